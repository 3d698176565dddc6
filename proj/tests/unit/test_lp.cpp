#include <cmath>
#include <random>

#include "cot/drm.hpp"
#include "cot/error.hpp"
#include "cot/ibp.hpp"
#include "cot/lp_oracle.hpp"
#include "cot/transport.hpp"
#include "doctest.h"
#include "support/oracles.hpp"
#include "support/random_instances.hpp"

using namespace cot;
using doctest::Approx;

namespace {

ProblemInstance swap_cost(double eta) {
  return ProblemInstance(CostSpec::dense(Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}})),
                         Marginals{{0.5, 0.5}, {0.5, 0.5}},
                         CapacityBounds{BoundSpec::zero(), BoundSpec::uniform(eta)});
}

void check_feasible(const LpSolution& s, const ProblemInstance& inst) {
  CHECK(bound_violation(s.plan, inst.bounds()) <= 1e-9);
  const MarginalResiduals r = marginal_residuals(s.plan, inst.marginals());
  CHECK(r.row <= 1e-9);
  CHECK(r.col <= 1e-9);
}

}  // namespace

TEST_CASE("small exact solutions") {
  const ProblemInstance one(CostSpec::dense(Matrix(1, 1, 0.7)), Marginals{{1.0}, {1.0}},
                            CapacityBounds{BoundSpec::zero(), BoundSpec::uniform(3.0)});
  const LpSolution s1 = lp_solve_exact(one);
  CHECK(s1.status == LpStatus::kOptimal);
  CHECK(s1.plan.gamma(0, 0) == Approx(1.0));
  CHECK(s1.objective == Approx(0.7));

  const LpSolution diag = lp_solve_exact(swap_cost(1.0));
  CHECK(diag.objective == Approx(0.0));
  CHECK(diag.plan.gamma(0, 0) == Approx(0.5));
  CHECK(diag.plan.gamma(0, 1) == Approx(0.0));

  // gamma_11 = t <= 0.3 costs 1 - 2t, so t = 0.3.
  const LpSolution capped = lp_solve_exact(swap_cost(0.3));
  CHECK(capped.status == LpStatus::kOptimal);
  CHECK(capped.objective == Approx(0.4).epsilon(1e-12));
  CHECK(capped.plan.gamma(0, 0) == Approx(0.3));
  CHECK(capped.plan.gamma(0, 1) == Approx(0.2));
  CHECK(capped.plan.gamma(1, 0) == Approx(0.2));
  CHECK(capped.plan.gamma(1, 1) == Approx(0.3));
  CHECK(capped.duality_gap <= 1e-9);
}

TEST_CASE("matches the dense tableau simplex on random instances") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + trial % 4, m = 2 + (trial / 4) % 4;
    const ProblemInstance inst = trial % 2 == 0 ? testing::random_upper_instance(n, m, rng, 0.0, 0.5)
                                                : testing::random_box_instance(n, m, rng);
    const LpSolution s = lp_solve_exact(inst);
    REQUIRE(s.status == LpStatus::kOptimal);
    const auto reference = testing::dense_transport_objective(inst);
    REQUIRE(reference);
    CHECK(std::abs(s.objective - *reference) <= 1e-10);
    CHECK(s.objective == Approx(objective(inst.cost(), s.plan)).epsilon(1e-12));
    check_feasible(s, inst);
  }
}

TEST_CASE("inactive capacity gives the classical OT optimum") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const Marginals m{testing::random_simplex(4, rng), testing::random_simplex(4, rng)};
    const Matrix cost = testing::random_matrix(4, 4, rng, 0.0, 1.0);
    Matrix loose(4, 4);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) loose(i, j) = std::min(m.u[i], m.v[j]);
    }
    const ProblemInstance capped(CostSpec::dense(cost), m, CapacityBounds{BoundSpec::zero(), BoundSpec::dense(loose)});
    const ProblemInstance free(CostSpec::dense(cost), m, CapacityBounds{BoundSpec::zero(), BoundSpec::uniform(1.0)});
    CHECK(lp_solve_exact(capped).objective == Approx(lp_solve_exact(free).objective).epsilon(1e-12));
  }
}

TEST_CASE("oracle is below every solver plan") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    const ProblemInstance inst = testing::random_upper_instance(8, 8, rng, 0.0, 0.4);
    const LpSolution oracle = lp_solve_exact(inst);
    // Minimality holds for feasible plans, so both solvers run to tight
    // tolerances and the comparison allows for the leftover residual.
    DrmConfig dcfg;
    dcfg.epsilon = 1e-2;
    dcfg.outer_tol = 1e-11;
    dcfg.newton_tol = 1e-13;
    IbpConfig icfg;
    icfg.epsilon = 1e-2;
    icfg.outer_tol = 1e-11;
    icfg.stop_measure = IbpStopMeasure::kEntrywiseMax;
    const TransportPlan drm = drm_solve(inst, dcfg).plan;
    const TransportPlan ibp = ibp_solve(inst, icfg).plan;
    for (const TransportPlan* plan : {&drm, &ibp}) {
      const MarginalResiduals r = marginal_residuals(*plan, inst.marginals());
      const double slack = 1e-9 + 8.0 * std::max(r.row, r.col);  // costs lie in [0, 1]
      CHECK(r.row <= 1e-9);
      CHECK(oracle.objective <= objective(inst.cost(), *plan) + slack);
    }

    const RelativeError e = relative_error(drm, inst, oracle);
    CHECK_FALSE(e.absolute);
    CHECK(e.value < 0.1);
    CHECK(relative_error(oracle.plan, inst, oracle).value == 0.0);
    CHECK(plan_gap(oracle.plan, oracle) == 0.0);
  }
}

TEST_CASE("relative error arithmetic") {
  const ProblemInstance one(CostSpec::dense(Matrix(1, 2, 1.0)), Marginals{{1.0}, {0.5, 0.5}},
                            CapacityBounds{BoundSpec::zero(), BoundSpec::uniform(1.0)});
  LpSolution oracle;
  oracle.status = LpStatus::kOptimal;
  oracle.objective = 1.0;
  oracle.plan = TransportPlan{Matrix::from_rows({{0.5, 0.5}})};
  const RelativeError e = relative_error(TransportPlan{Matrix::from_rows({{0.51, 0.51}})}, one, oracle);
  CHECK(e.value == Approx(0.02));

  oracle.objective = 0.0;
  const RelativeError abs_gap = relative_error(TransportPlan{Matrix::from_rows({{0.5, 0.5}})}, one, oracle);
  CHECK(abs_gap.absolute);
  CHECK(abs_gap.value == Approx(1.0));

  oracle.status = LpStatus::kIterationLimit;
  CHECK_THROWS_AS(relative_error(oracle.plan, one, oracle), Error);
}

TEST_CASE("infeasible instances and the size cap") {
  const LpSolution bad = lp_solve_exact(swap_cost(0.2));
  CHECK(bad.status == LpStatus::kInfeasible);
  CHECK_FALSE(bad.message.empty());

  std::mt19937_64 rng(8);
  const ProblemInstance inst = testing::random_upper_instance(11, 10, rng);
  LpOptions opt;
  opt.max_variables = 100;
  try {
    lp_solve_exact(inst, opt);
    FAIL("expected the size cap");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSizeCap);
  }
  opt.max_variables = 110;
  CHECK(lp_solve_exact(inst, opt).status == LpStatus::kOptimal);
}

TEST_CASE("degenerate instances with ties") {
  // All costs equal and marginals uniform: massive degeneracy.
  const std::size_t n = 12;
  const ProblemInstance flat(CostSpec::dense(Matrix(n, n, 1.0)),
                             Marginals{std::vector<double>(n, 1.0 / n), std::vector<double>(n, 1.0 / n)},
                             CapacityBounds{BoundSpec::zero(), BoundSpec::uniform(1.0 / (n * n) * 1.5)});
  const LpSolution s = lp_solve_exact(flat);
  REQUIRE(s.status == LpStatus::kOptimal);
  CHECK(s.objective == Approx(1.0).epsilon(1e-12));
  check_feasible(s, flat);

  // Integer grid costs on a 1D grid.
  const ProblemInstance grid(CostSpec::grid_1d(1.0),
                             Marginals{std::vector<double>(n, 1.0 / n), std::vector<double>(n, 1.0 / n)},
                             CapacityBounds{BoundSpec::zero(), BoundSpec::uniform(0.5 / n)});
  const LpSolution g = lp_solve_exact(grid);
  REQUIRE(g.status == LpStatus::kOptimal);
  check_feasible(g, grid);
  const auto reference = testing::dense_transport_objective(
      ProblemInstance(CostSpec::dense([&] {
                        Matrix c(n, n);
                        for (std::size_t i = 0; i < n; ++i)
                          for (std::size_t j = 0; j < n; ++j) c(i, j) = grid.cost()(i, j);
                        return c;
                      }()),
                      grid.marginals(), grid.bounds()));
  REQUIRE(reference);
  CHECK(g.objective == Approx(*reference).epsilon(1e-10));
}
