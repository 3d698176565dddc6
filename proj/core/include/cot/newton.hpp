#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "cot/error.hpp"

namespace cot {

struct NewtonOptions {
  // Stop when successive iterates differ by at most tol relative to the
  // current iterate.
  double tol = 1e-5;
  int max_iters = 100;
  // Stop as soon as |f(x)| <= abs_floor.
  double abs_floor = 0.0;
  int max_bracket_steps = 200;
};

struct NewtonResult {
  double root = 0.0;
  int iterations = 0;   // Newton/bisection steps after bracketing
  int evaluations = 0;  // total function evaluations
};

// Each evaluator returns {f(x), f'(x)} for a strictly decreasing f.
struct ValueAndSlope {
  double value;
  double slope;
};

namespace detail {

// Safeguarded Newton shared by both coordinate systems. `Coords` supplies
// how the bracket grows, where bisection lands, and the relative change
// measured between iterates.
template <class Coords, class Eval>
NewtonResult safeguarded_newton(Eval&& f, double start, const NewtonOptions& opt) {
  NewtonResult out;
  double x = start;
  ValueAndSlope fx = f(x);
  ++out.evaluations;
  if (std::abs(fx.value) <= opt.abs_floor) return {x, 0, out.evaluations};

  double lo = x, hi = x;
  {
    // Grow the bracket away from the start until the sign flips.
    bool found = false;
    const double origin = x;
    double probe = x;
    for (int step = 0; step < opt.max_bracket_steps; ++step) {
      probe = fx.value > 0.0 ? Coords::grow_up(origin, probe, step) : Coords::grow_down(origin, probe, step);
      const ValueAndSlope fp = f(probe);
      ++out.evaluations;
      if (std::abs(fp.value) <= opt.abs_floor) return {probe, 0, out.evaluations};
      if ((fp.value < 0.0) == (fx.value > 0.0)) {
        found = true;
        if (fx.value > 0.0) {
          hi = probe;
        } else {
          lo = probe;
        }
        break;
      }
      // Still on the same side: the probe becomes the tighter end.
      x = probe;
      fx = fp;
      if (fx.value > 0.0) {
        lo = probe;
      } else {
        hi = probe;
      }
    }
    if (!found) {
      throw Error(ErrorCode::kNewtonFailure,
                  "could not bracket the root within " + std::to_string(opt.max_bracket_steps) + " steps");
    }
  }

  for (int iter = 1; iter <= opt.max_iters; ++iter) {
    double next = x - fx.value / fx.slope;
    if (!(fx.slope < 0.0) || !(next > lo && next < hi) || !std::isfinite(next)) {
      next = Coords::split(lo, hi);
    }
    const ValueAndSlope fn = f(next);
    ++out.evaluations;
    const double change = Coords::relative_change(x, next);
    x = next;
    fx = fn;
    if (fx.value > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    out.iterations = iter;
    if (std::abs(fx.value) <= opt.abs_floor || change <= opt.tol || !(lo < hi) ||
        Coords::split(lo, hi) == lo || Coords::split(lo, hi) == hi) {
      out.root = x;
      return out;
    }
  }
  throw Error(ErrorCode::kNewtonFailure,
              "no convergence within " + std::to_string(opt.max_iters) + " iterations");
}

// Positive half-line, bracket grown by doubling/halving.
struct PositiveCoords {
  static double grow_up(double, double probe, int) { return probe * 2.0; }
  static double grow_down(double, double probe, int) { return probe * 0.5; }
  static double split(double lo, double hi) {
    return hi > 4.0 * lo ? std::sqrt(lo) * std::sqrt(hi) : 0.5 * (lo + hi);
  }
  static double relative_change(double from, double to) { return std::abs(to - from) / from; }
};

// Whole real line for t = ln x; bracket steps double in length. The change
// reported is the relative change of x = e^t.
struct LogCoords {
  static double grow_up(double start, double, int step) { return start + std::ldexp(1.0, step); }
  static double grow_down(double start, double, int step) { return start - std::ldexp(1.0, step); }
  static double split(double lo, double hi) { return 0.5 * (lo + hi); }
  static double relative_change(double from, double to) { return std::expm1(std::abs(to - from)); }
};

}  // namespace detail

// Root of a continuous, strictly decreasing f on (0, inf) that is positive
// near 0 and negative at infinity. Starts at `hint`, grows a bracket by
// doubling or halving, then runs Newton with a bisection fallback whenever
// the Newton step leaves the bracket.
template <class Eval>
NewtonResult newton_root(Eval&& f, double hint, const NewtonOptions& opt = {}) {
  if (!(hint > 0.0) || !std::isfinite(hint)) {
    throw Error(ErrorCode::kInvalidArgument, "newton_root hint must be positive and finite");
  }
  return detail::safeguarded_newton<detail::PositiveCoords>(std::forward<Eval>(f), hint, opt);
}

// Same contract in the coordinate t = ln x: f is decreasing on the real line
// and slope is df/dt. Used when the root may lie outside double range.
template <class Eval>
NewtonResult newton_root_log(Eval&& f, double log_hint, const NewtonOptions& opt = {}) {
  if (!std::isfinite(log_hint)) {
    throw Error(ErrorCode::kInvalidArgument, "newton_root_log hint must be finite");
  }
  return detail::safeguarded_newton<detail::LogCoords>(std::forward<Eval>(f), log_hint, opt);
}

}  // namespace cot
