#include "cot/drm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cot/error.hpp"
#include "cot/parallel.hpp"
#include "cot/tolerances.hpp"

namespace cot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Roots with |ln phi| beyond this are absorbed into the offsets right away,
// since exp() of them is not representable.
constexpr double kAbsorbLog = 700.0;

bool pinned(double scaling) { return scaling == 0.0 || std::isinf(scaling); }

// Logistic sigma(z) = p / (1 + p) for p = e^z, and sigma (1 - sigma).
struct Logistic {
  double sigma;
  double spread;
};

Logistic logistic(double z) {
  const double e = std::exp(-std::abs(z));
  const double denom = 1.0 + e;
  return {z >= 0.0 ? 1.0 / denom : e / denom, e / (denom * denom)};
}

double safe_log(double x) { return x == 0.0 ? -kInf : std::log(x); }

std::size_t resolve_threads(const DrmConfig& config) {
  return config.threads == 0 ? threads_from_env() : config.threads;
}

}  // namespace

DualPotentials DualPotentials::initial(std::size_t n, std::size_t m) {
  const double start = 1.0 / static_cast<double>(n);
  return DualPotentials{std::vector<double>(n, start), std::vector<double>(m, start),
                        std::vector<double>(n, 0.0), std::vector<double>(m, 0.0)};
}

void validate_config(const DrmConfig& config) {
  if (!(config.epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be > 0");
  if (!(config.outer_tol > 0.0) || !(config.newton_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tolerances must be > 0");
  }
  if (config.newton_max_iters <= 0) throw Error(ErrorCode::kInvalidArgument, "newton_max_iters must be > 0");
  if (!(config.stabilization_threshold > 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "stabilization threshold must be > 1");
  }
}

double kernel_entry(const CostSpec& cost, std::size_t i, std::size_t j, double epsilon) {
  return std::exp(-cost(i, j) / epsilon);
}

// ---------------------------------------------------------------------------
// DualEquation

void DualEquation::assign_row(const ProblemInstance& instance, const DualPotentials& duals, std::size_t i,
                              double epsilon, Form form, std::span<const double> log_opposite) {
  form_ = form;
  mass_ = instance.marginals().u[i];
  cost_.resize(instance.m());
  bound_.resize(instance.m());
  instance.cost().fill_row(i, cost_);
  instance.bounds().upper.fill_row(i, bound_);
  compress(duals.psi, log_opposite, duals.beta_abs, duals.alpha_abs[i], epsilon);
}

void DualEquation::assign_col(const ProblemInstance& instance, const DualPotentials& duals, std::size_t j,
                              double epsilon, Form form, std::span<const double> log_opposite) {
  form_ = form;
  mass_ = instance.marginals().v[j];
  cost_.resize(instance.n());
  bound_.resize(instance.n());
  instance.cost().fill_col(j, cost_);
  instance.bounds().upper.fill_col(j, bound_);
  compress(duals.phi, log_opposite, duals.alpha_abs, duals.beta_abs[j], epsilon);
}

void DualEquation::compress(std::span<const double> opposite, std::span<const double> log_opposite,
                            std::span<const double> opposite_offsets, double own_offset, double epsilon) {
  weight_.clear();
  coef_.clear();
  underflow_.reset();
  for (std::size_t k = 0; k < bound_.size(); ++k) {
    if (!(bound_[k] > 0.0)) continue;
    const double exponent = (own_offset + opposite_offsets[k] - cost_[k]) / epsilon;
    weight_.push_back(bound_[k]);
    if (form_ == Form::kLog) {
      const double log_scale = log_opposite.empty() ? safe_log(opposite[k]) : log_opposite[k];
      coef_.push_back(exponent + log_scale);
    } else {
      const double kernel = std::exp(exponent);
      double c = std::isinf(opposite[k]) ? (kernel > 0.0 ? kInf : 0.0) : kernel * opposite[k];
      if (c == 0.0 && opposite[k] > 0.0 && !underflow_) underflow_ = k;
      coef_.push_back(c);
    }
  }
}

ValueAndSlope DualEquation::at(double x) const {
  if (form_ == Form::kLog) {
    const ValueAndSlope r = at_log(std::log(x));
    return {r.value, r.slope / x};
  }
  double filled = 0.0, slope = 0.0;
  for (std::size_t k = 0; k < weight_.size(); ++k) {
    const double c = coef_[k];
    const double p = x * c;
    filled += weight_[k] / (1.0 + 1.0 / p);
    if (std::isfinite(p)) {
      const double d = 1.0 + p;
      slope -= weight_[k] * c / (d * d);
    }
  }
  return {mass_ - filled, slope};
}

ValueAndSlope DualEquation::at_log(double t) const {
  if (form_ == Form::kLinear) {
    const double x = std::exp(t);
    const ValueAndSlope r = at(x);
    return {r.value, r.slope * x};
  }
  double filled = 0.0, slope = 0.0;
  for (std::size_t k = 0; k < weight_.size(); ++k) {
    const Logistic l = logistic(t + coef_[k]);
    filled += weight_[k] * l.sigma;
    slope -= weight_[k] * l.spread;
  }
  return {mass_ - filled, slope};
}

// ---------------------------------------------------------------------------
// g / f evaluated directly from the closed forms, with zero offsets.

namespace {

DualEquation linear_row(const ProblemInstance& instance, std::size_t i, std::span<const double> psi,
                        double epsilon) {
  DualPotentials duals{std::vector<double>(instance.n(), 1.0), std::vector<double>(psi.begin(), psi.end()),
                       std::vector<double>(instance.n(), 0.0), std::vector<double>(instance.m(), 0.0)};
  DualEquation eq;
  eq.assign_row(instance, duals, i, epsilon, DualEquation::Form::kLinear);
  return eq;
}

DualEquation linear_col(const ProblemInstance& instance, std::size_t j, std::span<const double> phi,
                        double epsilon) {
  DualPotentials duals{std::vector<double>(phi.begin(), phi.end()), std::vector<double>(instance.m(), 1.0),
                       std::vector<double>(instance.n(), 0.0), std::vector<double>(instance.m(), 0.0)};
  DualEquation eq;
  eq.assign_col(instance, duals, j, epsilon, DualEquation::Form::kLinear);
  return eq;
}

}  // namespace

double g_eval(const ProblemInstance& instance, std::size_t i, double phi_i, std::span<const double> psi,
              double epsilon) {
  return linear_row(instance, i, psi, epsilon).at(phi_i).value;
}

double g_derivative(const ProblemInstance& instance, std::size_t i, double phi_i,
                    std::span<const double> psi, double epsilon) {
  return linear_row(instance, i, psi, epsilon).at(phi_i).slope;
}

double f_eval(const ProblemInstance& instance, std::size_t j, double psi_j, std::span<const double> phi,
              double epsilon) {
  return linear_col(instance, j, phi, epsilon).at(psi_j).value;
}

double f_derivative(const ProblemInstance& instance, std::size_t j, double psi_j,
                    std::span<const double> phi, double epsilon) {
  return linear_col(instance, j, phi, epsilon).at(psi_j).slope;
}

// ---------------------------------------------------------------------------
// Half sweeps

namespace {

enum class Side { kRows, kCols };

// Lines whose mass (nearly) fills their capacity; the root sits at +inf.
bool saturated(double mass, double capacity) {
  return mass > 0.0 && mass >= (1.0 - tol::kStrictMargin) * capacity;
}

SweepStats sweep(Side side, DualPotentials& duals, const ProblemInstance& instance, const DrmConfig& config) {
  const bool rows = side == Side::kRows;
  const std::size_t count = rows ? instance.n() : instance.m();
  const std::vector<double>& masses = rows ? instance.marginals().u : instance.marginals().v;
  std::vector<double>& scaling = rows ? duals.phi : duals.psi;
  std::vector<double>& offsets = rows ? duals.alpha_abs : duals.beta_abs;
  const std::vector<double>& opposite = rows ? duals.psi : duals.phi;
  const auto form = config.stabilization_enabled ? DualEquation::Form::kLog : DualEquation::Form::kLinear;
  const double epsilon = config.epsilon;

  std::vector<double> log_opposite;
  if (form == DualEquation::Form::kLog) {
    log_opposite.resize(opposite.size());
    std::transform(opposite.begin(), opposite.end(), log_opposite.begin(), safe_log);
  }

  NewtonOptions options;
  options.tol = config.newton_tol;
  options.max_iters = config.newton_max_iters;
  options.abs_floor = 1e-12 * *std::max_element(masses.begin(), masses.end());

  const std::size_t threads = std::max<std::size_t>(1, std::min(resolve_threads(config), count));
  std::vector<SweepStats> per_worker(threads);
  const double start_hint = 1.0 / static_cast<double>(instance.n());

  parallel_for(count, threads, [&](std::size_t begin, std::size_t end, std::size_t worker) {
    DualEquation eq;
    SweepStats& stats = per_worker[worker];
    for (std::size_t line = begin; line < end; ++line) {
      if (masses[line] == 0.0) {
        scaling[line] = 0.0;
        continue;
      }
      if (rows) {
        eq.assign_row(instance, duals, line, epsilon, form, log_opposite);
      } else {
        eq.assign_col(instance, duals, line, epsilon, form, log_opposite);
      }
      const char* label = rows ? "row " : "column ";
      if (eq.underflow()) {
        throw Error(ErrorCode::kKernelUnderflow,
                    std::string(label) + std::to_string(line) + ": kernel product underflows at opposite index " +
                        std::to_string(*eq.underflow()) + "; enable stabilization",
                    line);
      }
      if (std::isinf(scaling[line])) continue;  // saturated line, fixed before the loop
      try {
        if (form == DualEquation::Form::kLog) {
          const double hint = scaling[line] > 0.0 ? std::log(scaling[line]) : 0.0;
          const NewtonResult r = newton_root_log([&](double t) { return eq.at_log(t); }, hint, options);
          stats.newton_iters += static_cast<std::size_t>(r.iterations);
          if (std::abs(r.root) > kAbsorbLog) {
            offsets[line] += epsilon * r.root;
            scaling[line] = 1.0;
          } else {
            scaling[line] = std::exp(r.root);
          }
        } else {
          const double hint = scaling[line] > 0.0 ? scaling[line] : start_hint;
          const NewtonResult r = newton_root([&](double x) { return eq.at(x); }, hint, options);
          stats.newton_iters += static_cast<std::size_t>(r.iterations);
          scaling[line] = r.root;
        }
      } catch (const Error& e) {
        throw Error(e.code(), std::string(label) + std::to_string(line) + ": " + e.what(), line);
      }
    }
    stats.scratch_scalars = eq.scalars();
  });

  SweepStats total;
  total.scratch_scalars = log_opposite.capacity();
  for (const SweepStats& s : per_worker) {
    total.newton_iters += s.newton_iters;
    total.scratch_scalars += s.scratch_scalars;
  }
  return total;
}

}  // namespace

SweepStats half_sweep_rows(DualPotentials& duals, const ProblemInstance& instance, const DrmConfig& config) {
  return sweep(Side::kRows, duals, instance, config);
}

SweepStats half_sweep_cols(DualPotentials& duals, const ProblemInstance& instance, const DrmConfig& config) {
  return sweep(Side::kCols, duals, instance, config);
}

void stabilize(DualPotentials& duals, double epsilon) {
  auto absorb = [epsilon](std::vector<double>& scaling, std::vector<double>& offsets) {
    for (std::size_t k = 0; k < scaling.size(); ++k) {
      if (pinned(scaling[k])) continue;
      offsets[k] += epsilon * std::log(scaling[k]);
      scaling[k] = 1.0;
    }
  };
  absorb(duals.phi, duals.alpha_abs);
  absorb(duals.psi, duals.beta_abs);
}

bool stabilize_if_needed(DualPotentials& duals, const DrmConfig& config) {
  auto largest = [](const std::vector<double>& x) {
    double best = 0.0;
    for (double value : x) {
      if (std::isfinite(value)) best = std::max(best, value);
    }
    return best;
  };
  if (largest(duals.phi) > config.stabilization_threshold || largest(duals.psi) > config.stabilization_threshold) {
    stabilize(duals, config.epsilon);
    return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Plan recovery

namespace {

// Fills one row of the plan from the duals. Shared by recover_plan and the
// streaming statistics so both see bit-identical entries.
class PlanRows {
 public:
  PlanRows(const DualPotentials& duals, const ProblemInstance& instance, double epsilon)
      : duals_(duals), instance_(instance), epsilon_(epsilon), log_psi_(instance.m()), cost_(instance.m()) {
    std::transform(duals.psi.begin(), duals.psi.end(), log_psi_.begin(), safe_log);
  }

  void fill(std::size_t i, std::span<double> out) {
    instance_.bounds().upper.fill_row(i, out);
    instance_.cost().fill_row(i, cost_);
    const double log_phi = safe_log(duals_.phi[i]);
    const double alpha = duals_.alpha_abs[i];
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (!(out[j] > 0.0)) {
        out[j] = 0.0;
        continue;
      }
      const double z = log_phi + log_psi_[j] + (alpha + duals_.beta_abs[j] - cost_[j]) / epsilon_;
      out[j] *= logistic(z).sigma;
    }
  }

 private:
  const DualPotentials& duals_;
  const ProblemInstance& instance_;
  double epsilon_;
  std::vector<double> log_psi_;
  std::vector<double> cost_;
};

struct PlanStatistics {
  double objective = 0.0;
  MarginalResiduals residuals;
};

// Objective and residuals of the recovered plan without materializing it.
PlanStatistics stream_statistics(const DualPotentials& duals, const ProblemInstance& instance,
                                 double epsilon) {
  PlanRows rows(duals, instance, epsilon);
  std::vector<double> gamma(instance.m()), cost(instance.m()), col_sums(instance.m(), 0.0);
  PlanStatistics stats;
  for (std::size_t i = 0; i < instance.n(); ++i) {
    rows.fill(i, gamma);
    instance.cost().fill_row(i, cost);
    double row_sum = 0.0;
    for (std::size_t j = 0; j < instance.m(); ++j) {
      stats.objective += cost[j] * gamma[j];
      row_sum += gamma[j];
      col_sums[j] += gamma[j];
    }
    stats.residuals.row = std::max(stats.residuals.row, std::abs(row_sum - instance.marginals().u[i]));
  }
  for (std::size_t j = 0; j < instance.m(); ++j) {
    stats.residuals.col = std::max(stats.residuals.col, std::abs(col_sums[j] - instance.marginals().v[j]));
  }
  return stats;
}

}  // namespace

TransportPlan recover_plan(const DualPotentials& duals, const ProblemInstance& instance, double epsilon) {
  if (duals.phi.size() != instance.n() || duals.psi.size() != instance.m()) {
    throw Error(ErrorCode::kDimensionMismatch, "duals do not match instance");
  }
  TransportPlan plan{Matrix(instance.n(), instance.m())};
  PlanRows rows(duals, instance, epsilon);
  for (std::size_t i = 0; i < instance.n(); ++i) rows.fill(i, plan.gamma.row(i));
  return plan;
}

// ---------------------------------------------------------------------------
// Driver

namespace {

// Fixes saturated lines at +inf and rejects combinations that cannot be
// represented (a saturated line crossing a zero-mass line through a cell of
// positive capacity).
void pin_saturated_lines(const ProblemInstance& instance, DualPotentials& duals) {
  const std::size_t n = instance.n(), m = instance.m();
  const auto& [u, v] = instance.marginals();
  const BoundSpec& eta = instance.bounds().upper;
  std::vector<double> line;
  for (std::size_t i = 0; i < n; ++i) {
    if (!saturated(u[i], eta.row_sum(i, m))) continue;
    duals.phi[i] = kInf;
    line.resize(m);
    eta.fill_row(i, line);
    for (std::size_t j = 0; j < m; ++j) {
      if (line[j] > 0.0 && v[j] == 0.0) {
        throw Error(ErrorCode::kDegenerate,
                    "row " + std::to_string(i) + " is at capacity but crosses empty column " + std::to_string(j), i);
      }
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!saturated(v[j], eta.col_sum(j, n))) continue;
    duals.psi[j] = kInf;
    line.resize(n);
    eta.fill_col(j, line);
    for (std::size_t i = 0; i < n; ++i) {
      if (line[i] > 0.0 && u[i] == 0.0) {
        throw Error(ErrorCode::kDegenerate,
                    "column " + std::to_string(j) + " is at capacity but crosses empty row " + std::to_string(i), j);
      }
    }
  }
}

// eps * ln(phi) + alpha_abs, the additive dual potential; pinned entries are
// reported as -inf so they drop out of the change measure.
void log_potentials(const std::vector<double>& scaling, const std::vector<double>& offsets, double epsilon,
                    std::vector<double>& out) {
  out.resize(scaling.size());
  for (std::size_t k = 0; k < scaling.size(); ++k) {
    out[k] = pinned(scaling[k]) ? -kInf : offsets[k] + epsilon * std::log(scaling[k]);
  }
}

// ||phi' - phi||_1 / ||phi||_1 for the effective scalings phi = exp(a / eps),
// evaluated after shifting every exponent by the common maximum. Pinned
// entries come in as -inf and contribute nothing.
double relative_scaling_change(const std::vector<double>& before, const std::vector<double>& after,
                               double epsilon) {
  double top = -kInf;
  for (std::size_t k = 0; k < before.size(); ++k) top = std::max({top, before[k], after[k]});
  if (std::isinf(top)) return 0.0;
  double diff = 0.0, base = 0.0;
  for (std::size_t k = 0; k < before.size(); ++k) {
    const double old_scaled = std::exp((before[k] - top) / epsilon);
    diff += std::abs(std::exp((after[k] - top) / epsilon) - old_scaled);
    base += old_scaled;
  }
  if (diff == 0.0) return 0.0;
  return base > 0.0 ? diff / base : kInf;
}

double lower_bound_cost(const ProblemInstance& instance) {
  std::vector<double> theta(instance.m()), cost(instance.m());
  double total = 0.0;
  for (std::size_t i = 0; i < instance.n(); ++i) {
    instance.bounds().lower.fill_row(i, theta);
    instance.cost().fill_row(i, cost);
    for (std::size_t j = 0; j < instance.m(); ++j) total += cost[j] * theta[j];
  }
  return total;
}

std::size_t vector_scalars(const DualPotentials& d) {
  return d.phi.capacity() + d.psi.capacity() + d.alpha_abs.capacity() + d.beta_abs.capacity();
}

}  // namespace

DrmResult drm_solve(const ProblemInstance& instance, const DrmConfig& config, const TraceSink& trace) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - started).count(); };

  validate_config(config);
  if (const ValidationResult check = validate_feasibility(instance); !check.ok()) {
    throw Error(ErrorCode::kInfeasible, "instance is infeasible: " + check.summary());
  }

  std::optional<Reduction> reduction;
  DrmConfig work_config = config;
  double objective_offset = 0.0;
  if (instance.has_lower_bounds()) {
    reduction = reduce_to_upper_bounded(instance);
    work_config.epsilon *= reduction->record.k_theta;
    objective_offset = lower_bound_cost(instance);
  }
  const ProblemInstance& work = reduction ? reduction->reduced : instance;
  work_config.threads = resolve_threads(config);

  DrmResult result;
  DualPotentials& duals = result.duals;
  duals = DualPotentials::initial(work.n(), work.m());
  pin_saturated_lines(work, duals);

  SolveReport& report = result.report;
  std::vector<double> a_prev, b_prev, a_next, b_next;
  log_potentials(duals.phi, duals.alpha_abs, work_config.epsilon, a_prev);
  log_potentials(duals.psi, duals.beta_abs, work_config.epsilon, b_prev);

  std::size_t peak_state = 0;
  for (std::size_t iter = 1; iter <= work_config.max_outer_iters; ++iter) {
    const SweepStats row_stats = half_sweep_rows(duals, work, work_config);
    const SweepStats col_stats = half_sweep_cols(duals, work, work_config);
    report.total_newton_iters += row_stats.newton_iters + col_stats.newton_iters;
    if (work_config.stabilization_enabled && stabilize_if_needed(duals, work_config)) ++report.stabilizations;

    log_potentials(duals.phi, duals.alpha_abs, work_config.epsilon, a_next);
    log_potentials(duals.psi, duals.beta_abs, work_config.epsilon, b_next);
    const double delta = std::max(relative_scaling_change(a_prev, a_next, work_config.epsilon),
                                  relative_scaling_change(b_prev, b_next, work_config.epsilon));
    std::swap(a_prev, a_next);
    std::swap(b_prev, b_next);
    report.outer_residual_history.push_back(delta);
    report.outer_iters = iter;

    peak_state = std::max(peak_state, vector_scalars(duals) + a_prev.capacity() + b_prev.capacity() +
                                          a_next.capacity() + b_next.capacity() +
                                          std::max(row_stats.scratch_scalars, col_stats.scratch_scalars));

    if (trace) {
      const PlanStatistics stats = stream_statistics(duals, work, work_config.epsilon);
      TraceRecord record;
      record.iteration = iter;
      record.time_s = elapsed();
      record.delta_outer = delta;
      record.objective = stats.objective + objective_offset;
      const double k = reduction ? reduction->record.k_theta : 1.0;
      record.row_residual = k * stats.residuals.row;
      record.col_residual = k * stats.residuals.col;
      trace(record);
    }

    if (delta <= work_config.outer_tol) {
      report.converged = true;
      report.stop_reason = StopReason::kTolerance;
      break;
    }
    if (elapsed() > work_config.time_budget_s) {
      report.stop_reason = StopReason::kTimeBudget;
      break;
    }
  }

  result.plan = recover_plan(duals, work, work_config.epsilon);
  if (reduction) {
    result.plan = lift_plan(result.plan, reduction->record);
    result.reduction = reduction->record;
  }
  const MarginalResiduals residuals = marginal_residuals(result.plan, instance.marginals());
  report.final_row_residual = residuals.row;
  report.final_col_residual = residuals.col;
  report.state_scalars = peak_state;
  report.wall_time_s = elapsed();
  return result;
}

}  // namespace cot
