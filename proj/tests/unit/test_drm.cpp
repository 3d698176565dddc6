#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cot/drm.hpp"
#include "cot/error.hpp"
#include "cot/lp_oracle.hpp"
#include "cot/transport.hpp"
#include "doctest.h"
#include "support/random_instances.hpp"

using namespace cot;
using doctest::Approx;

namespace {

ProblemInstance one_cell(double eta, double cost = 0.0) {
  return ProblemInstance(CostSpec::dense(Matrix(1, 1, cost)), Marginals{{1.0}, {1.0}},
                         CapacityBounds{BoundSpec::zero(), BoundSpec::uniform(eta)});
}

// Row i of the plan phi_i exp((a_i + b_j - C_ij) / eps) psi_j eta / (1 + ...),
// written out directly.
Matrix direct_plan(const DualPotentials& d, const ProblemInstance& inst, double eps) {
  Matrix out(inst.n(), inst.m());
  for (std::size_t i = 0; i < inst.n(); ++i) {
    for (std::size_t j = 0; j < inst.m(); ++j) {
      const double p =
          d.phi[i] * std::exp((d.alpha_abs[i] + d.beta_abs[j] - inst.cost()(i, j)) / eps) * d.psi[j];
      out(i, j) = inst.bounds().eta(i, j) * p / (1.0 + p);
    }
  }
  return out;
}

ProblemInstance symmetric_instance(std::size_t n, std::mt19937_64& rng) {
  std::vector<double> u = testing::random_simplex(n, rng);
  Matrix c = testing::random_matrix(n, n, rng, 0.0, 1.0);
  Matrix eta = testing::random_matrix(n, n, rng, 0.5, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      c(i, j) = c(j, i);
      eta(i, j) = eta(j, i);
    }
  }
  return ProblemInstance(CostSpec::dense(std::move(c)), Marginals{u, u},
                         CapacityBounds{BoundSpec::zero(), BoundSpec::dense(std::move(eta))});
}

}  // namespace

TEST_CASE("kernel entries") {
  const CostSpec c = CostSpec::dense(Matrix::from_rows({{0.0, 1e-3, 100.0}}));
  CHECK(kernel_entry(c, 0, 0, 1e-3) == 1.0);
  CHECK(kernel_entry(c, 0, 1, 1e-3) == Approx(0.367879441171).epsilon(1e-11));
  CHECK(kernel_entry(c, 0, 2, 1e-3) == 0.0);
}

TEST_CASE("g and f on the single-cell instance") {
  // eta = 2, K psi = 1, u = 1: g = 2 / (1 + phi) - 1.
  const ProblemInstance inst = one_cell(2.0);
  const std::vector<double> one{1.0};
  for (double phi : {0.25, 1.0, 3.0}) {
    CHECK(g_eval(inst, 0, phi, one, 1.0) == Approx(2.0 / (1.0 + phi) - 1.0).epsilon(1e-14));
    CHECK(f_eval(inst, 0, phi, one, 1.0) == Approx(2.0 / (1.0 + phi) - 1.0).epsilon(1e-14));
  }
  CHECK(g_eval(inst, 0, 1.0, one, 1.0) == Approx(0.0).epsilon(1e-15));
  CHECK(g_derivative(inst, 0, 1.0, one, 1.0) == Approx(-0.5).epsilon(1e-14));
  CHECK(f_derivative(inst, 0, 1.0, one, 1.0) == Approx(-0.5).epsilon(1e-14));

  // Limits: u at 0+, u - sum eta at infinity.
  CHECK(g_eval(inst, 0, 1e-300, one, 1.0) == Approx(1.0));
  CHECK(g_eval(inst, 0, 1e300, one, 1.0) == Approx(-1.0));

  // A zero eta row contributes nothing.
  const ProblemInstance empty_row(CostSpec::dense(Matrix(1, 2)), Marginals{{0.0}, {0.0, 0.0}},
                                  CapacityBounds{BoundSpec::zero(), BoundSpec::zero()});
  CHECK(g_derivative(empty_row, 0, 1.0, std::vector<double>{1.0, 1.0}, 1.0) == 0.0);
}

TEST_CASE("f mirrors g on a symmetric instance") {
  std::mt19937_64 rng(17);
  const ProblemInstance inst = symmetric_instance(5, rng);
  std::vector<double> duals(5);
  for (double& x : duals) x = std::exp(std::uniform_real_distribution<double>(-2.0, 2.0)(rng));
  for (std::size_t k = 0; k < 5; ++k) {
    for (double x : {1e-3, 0.7, 12.0}) {
      CHECK(f_eval(inst, k, x, duals, 0.3) == Approx(g_eval(inst, k, x, duals, 0.3)).epsilon(1e-13));
      CHECK(f_derivative(inst, k, x, duals, 0.3) == Approx(g_derivative(inst, k, x, duals, 0.3)).epsilon(1e-13));
    }
  }
}

TEST_CASE("g is decreasing with correct signs and derivative on random draws") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> logx(-8.0, 8.0);
  for (int draw = 0; draw < 100; ++draw) {
    const ProblemInstance inst = testing::random_upper_instance(4, 6, rng);
    std::vector<double> psi(6);
    for (double& x : psi) x = std::exp(logx(rng));
    const double eps = 0.5;
    for (std::size_t i = 0; i < 4; ++i) {
      double a = std::exp(logx(rng)), b = std::exp(logx(rng));
      if (a > b) std::swap(a, b);
      if (a == b) continue;
      CHECK(g_eval(inst, i, a, psi, eps) > g_eval(inst, i, b, psi, eps));
      CHECK(g_eval(inst, i, 1e-12, psi, eps) > 0.0);
      CHECK(g_eval(inst, i, 1e12, psi, eps) < 0.0);
      const double h = 1e-6 * a;
      const double fd = (g_eval(inst, i, a + h, psi, eps) - g_eval(inst, i, a - h, psi, eps)) / (2.0 * h);
      const double exact = g_derivative(inst, i, a, psi, eps);
      CHECK(std::abs(exact - fd) <= 1e-6 * std::max(std::abs(exact), 1e-300) + 1e-10);
    }
  }
}

TEST_CASE("half sweeps on the single-cell instance") {
  const ProblemInstance inst = one_cell(2.0);
  DrmConfig cfg;
  cfg.epsilon = 1.0;
  cfg.newton_tol = 1e-14;
  for (bool stabilized : {true, false}) {
    cfg.stabilization_enabled = stabilized;
    DualPotentials d = DualPotentials::initial(1, 1);
    CHECK(d.phi[0] == 1.0);
    half_sweep_rows(d, inst, cfg);
    CHECK(d.phi[0] * d.psi[0] == Approx(1.0).epsilon(1e-12));
    half_sweep_cols(d, inst, cfg);
    CHECK(d.phi[0] * d.psi[0] == Approx(1.0).epsilon(1e-12));
    const TransportPlan plan = recover_plan(d, inst, 1.0);
    CHECK(plan.gamma(0, 0) == Approx(1.0).epsilon(1e-12));

    // A converged point is a fixed point.
    const double before = d.phi[0];
    half_sweep_rows(d, inst, cfg);
    CHECK(d.phi[0] == Approx(before).epsilon(1e-12));
  }
}

TEST_CASE("row sweep meets the marginals; row order does not matter") {
  std::mt19937_64 rng(9);
  const ProblemInstance inst = testing::random_upper_instance(7, 5, rng);
  DrmConfig cfg;
  cfg.epsilon = 0.05;
  cfg.newton_tol = 1e-8;
  DualPotentials d = DualPotentials::initial(7, 5);
  std::uniform_real_distribution<double> logx(-3.0, 3.0);
  for (double& x : d.psi) x = std::exp(logx(rng));
  DualPotentials cols = d;
  half_sweep_rows(d, inst, cfg);
  const TransportPlan plan = recover_plan(d, inst, cfg.epsilon);
  CHECK(marginal_residuals(plan, inst.marginals()).row <= 1e-6);

  half_sweep_cols(cols, inst, cfg);
  CHECK(marginal_residuals(recover_plan(cols, inst, cfg.epsilon), inst.marginals()).col <= 1e-6);

  // Reverse the rows of the instance and the duals; the sweep must give the
  // reversed phi.
  std::vector<std::size_t> order(7);
  std::iota(order.rbegin(), order.rend(), 0);
  Matrix c(7, 5), eta(7, 5);
  std::vector<double> u(7);
  for (std::size_t r = 0; r < 7; ++r) {
    u[r] = inst.marginals().u[order[r]];
    for (std::size_t j = 0; j < 5; ++j) {
      c(r, j) = inst.cost()(order[r], j);
      eta(r, j) = inst.bounds().eta(order[r], j);
    }
  }
  const ProblemInstance flipped(CostSpec::dense(c), Marginals{u, inst.marginals().v},
                                CapacityBounds{BoundSpec::zero(), BoundSpec::dense(eta)});
  DualPotentials e = DualPotentials::initial(7, 5);
  e.psi = cols.psi;
  e.psi = d.psi;
  half_sweep_rows(e, flipped, cfg);
  for (std::size_t r = 0; r < 7; ++r) CHECK(e.phi[r] == d.phi[order[r]]);
}

TEST_CASE("stabilization keeps the effective product") {
  DualPotentials d = DualPotentials::initial(2, 2);
  d.phi = {std::exp(10.0), 1.0};
  d.psi = {1.0, 1.0};
  stabilize(d, 1.0);
  CHECK(d.alpha_abs[0] == Approx(10.0).epsilon(1e-14));
  CHECK(d.phi[0] == 1.0);

  DualPotentials ones = DualPotentials::initial(2, 2);
  ones.phi = {1.0, 1.0};
  ones.psi = {1.0, 1.0};
  stabilize(ones, 0.5);
  CHECK(ones.alpha_abs == std::vector<double>{0.0, 0.0});
  CHECK(ones.beta_abs == std::vector<double>{0.0, 0.0});

  std::mt19937_64 rng(4);
  const ProblemInstance inst = testing::random_upper_instance(5, 5, rng);
  DualPotentials r = DualPotentials::initial(5, 5);
  std::uniform_real_distribution<double> logx(-20.0, 20.0);
  for (double& x : r.phi) x = std::exp(logx(rng));
  for (double& x : r.psi) x = std::exp(logx(rng));
  const Matrix before = direct_plan(r, inst, 0.1);
  const TransportPlan via_solver = recover_plan(r, inst, 0.1);
  stabilize(r, 0.1);
  const TransportPlan after = recover_plan(r, inst, 0.1);
  for (std::size_t t = 0; t < before.size(); ++t) {
    CHECK(std::abs(after.gamma.values()[t] - before.values()[t]) <= 1e-10);
    CHECK(std::abs(via_solver.gamma.values()[t] - before.values()[t]) <= 1e-12);
  }

  DrmConfig cfg;
  cfg.stabilization_threshold = 1e20;
  r.phi[2] = 1e25;
  CHECK(stabilize_if_needed(r, cfg));
  CHECK_FALSE(stabilize_if_needed(r, cfg));
}

TEST_CASE("recovered plans stay inside the box") {
  std::mt19937_64 rng(6);
  const ProblemInstance inst = testing::random_upper_instance(6, 6, rng);
  DualPotentials d = DualPotentials::initial(6, 6);
  d.phi = {0.0, 1e-300, 1.0, 1e300, std::numeric_limits<double>::infinity(), 3.0};
  const TransportPlan plan = recover_plan(d, inst, 0.01);
  CHECK(bound_violation(plan, inst.bounds()) == 0.0);
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(plan.gamma(0, j) == 0.0);
    CHECK(plan.gamma(4, j) == inst.bounds().eta(4, j));
  }
}

TEST_CASE("drm_solve basics") {
  SUBCASE("single cell") {
    for (double eta : {1.0, 1.5, 10.0}) {
      const DrmResult r = drm_solve(one_cell(eta, 0.3));
      CHECK(r.plan.gamma(0, 0) == Approx(1.0).epsilon(1e-9));
    }
  }
  SUBCASE("3x3 classical OT within 5 eps N ln N") {
    std::mt19937_64 rng(12);
    const Marginals m{testing::random_simplex(3, rng), testing::random_simplex(3, rng)};
    const ProblemInstance inst(CostSpec::dense(testing::random_matrix(3, 3, rng, 0.0, 1.0)), m,
                               CapacityBounds{BoundSpec::zero(), BoundSpec::uniform(1.0)});
    DrmConfig cfg;
    cfg.epsilon = 1e-2;
    const DrmResult r = drm_solve(inst, cfg);
    CHECK(r.report.converged);
    const double lp = lp_solve_exact(inst).objective;
    CHECK(std::abs(objective(inst.cost(), r.plan) - lp) <= 5.0 * cfg.epsilon * 3.0 * std::log(3.0));
  }
  SUBCASE("report") {
    std::mt19937_64 rng(1);
    const ProblemInstance inst = testing::random_upper_instance(10, 8, rng);
    DrmConfig cfg;
    cfg.epsilon = 0.01;
    const DrmResult r = drm_solve(inst, cfg);
    REQUIRE(r.report.converged);
    CHECK(r.report.stop_reason == StopReason::kTolerance);
    CHECK(r.report.outer_residual_history.size() == r.report.outer_iters);
    CHECK(r.report.outer_residual_history.back() <= cfg.outer_tol);
    CHECK(r.report.total_newton_iters > 0);
    CHECK(r.report.state_scalars <= 8 * (10 + 8));
    CHECK(bound_violation(r.plan, inst.bounds()) == 0.0);
    CHECK(r.report.final_row_residual <= 10 * cfg.outer_tol);
  }
  SUBCASE("lower bounds are lifted back") {
    std::mt19937_64 rng(3);
    const ProblemInstance inst = testing::random_box_instance(5, 5, rng);
    DrmConfig cfg;
    cfg.epsilon = 0.01;
    const DrmResult r = drm_solve(inst, cfg);
    CHECK(r.reduction.has_value());
    CHECK(bound_violation(r.plan, inst.bounds()) <= 1e-15);
    CHECK(r.report.final_col_residual <= 10 * cfg.outer_tol);
  }
  SUBCASE("trace records") {
    std::mt19937_64 rng(7);
    const ProblemInstance inst = testing::random_upper_instance(4, 4, rng);
    std::vector<TraceRecord> records;
    DrmConfig cfg;
    cfg.epsilon = 0.05;
    const DrmResult r = drm_solve(inst, cfg, [&](const TraceRecord& t) { records.push_back(t); });
    REQUIRE(records.size() == r.report.outer_iters);
    CHECK(records.back().objective == Approx(objective(inst.cost(), r.plan)).epsilon(1e-12));
    CHECK(records.front().iteration == 1);
  }
  SUBCASE("errors") {
    DrmConfig bad;
    bad.epsilon = 0.0;
    CHECK_THROWS_AS(validate_config(bad), Error);
    bad = DrmConfig{};
    bad.stabilization_threshold = 1.0;
    CHECK_THROWS_AS(validate_config(bad), Error);
    try {
      drm_solve(one_cell(0.5));
      FAIL("expected infeasible");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInfeasible);
    }
  }
}

TEST_CASE("unstabilized sweeps report kernel underflow with the row index") {
  const ProblemInstance inst(CostSpec::dense(Matrix::from_rows({{0.0, 5.0}, {5.0, 0.0}})),
                             Marginals{{0.5, 0.5}, {0.5, 0.5}},
                             CapacityBounds{BoundSpec::zero(), BoundSpec::uniform(0.4)});
  DrmConfig cfg;
  cfg.epsilon = 1e-3;
  cfg.stabilization_enabled = false;
  try {
    drm_solve(inst, cfg);
    FAIL("expected underflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kKernelUnderflow);
    CHECK(e.index() != Error::kNoIndex);
  }
  cfg.stabilization_enabled = true;
  cfg.outer_tol = 1e-9;
  cfg.newton_tol = 1e-12;
  const DrmResult r = drm_solve(inst, cfg);
  CHECK(r.report.converged);
  // The optimum puts 0.4 on the diagonal.
  CHECK(r.plan.gamma(0, 0) == Approx(0.4).epsilon(1e-6));
}

TEST_CASE("thread count does not change the result") {
  std::mt19937_64 rng(31);
  const ProblemInstance inst = testing::random_upper_instance(40, 33, rng);
  DrmConfig cfg;
  cfg.epsilon = 0.01;
  cfg.threads = 1;
  const DrmResult one = drm_solve(inst, cfg);
  cfg.threads = 4;
  const DrmResult four = drm_solve(inst, cfg);
  CHECK(one.report.outer_iters == four.report.outer_iters);
  CHECK(one.plan.gamma == four.plan.gamma);
}
