#pragma once

#include <cstddef>
#include <span>

#include "cot/matrix.hpp"
#include "cot/problem.hpp"
#include "cot/report.hpp"

namespace cot {

// How the per-cycle plan change is measured for the stopping test.
enum class IbpStopMeasure {
  kRelativeL1,    // ||gamma_new - gamma_old||_1 / ||gamma_old||_1
  kEntrywiseMax,  // max_ij |gamma_new - gamma_old| / max(gamma_new, gamma_old)
};

struct IbpConfig {
  double epsilon = 1e-3;
  std::size_t max_iters = 100000;
  double outer_tol = 1e-5;
  // Refuse instances with more than this many cells.
  std::size_t max_entries = 25'000'000;
  double time_budget_s = kNoTimeBudget;
  // The L1 measure can stall when the box clips the dominant entries and
  // the remaining mass moves slowly; kEntrywiseMax runs to full convergence.
  IbpStopMeasure stop_measure = IbpStopMeasure::kRelativeL1;
};

// Dykstra iterate: the current plan and the multiplicative correction kept
// for the box set (the only non-affine set). cycle_position counts completed
// projections mod 3 (rows, cols, box).
struct DykstraState {
  Matrix plan;
  Matrix corrections;
  int cycle_position = 0;
};

// gamma <- diag(u / gamma 1) gamma. Rows with u_i = 0 become zero; a zero row
// sum with u_i > 0 throws kDegenerate carrying the row index.
void kl_project_rows(DykstraState& state, std::span<const double> u);
void kl_project_cols(DykstraState& state, std::span<const double> v);
// g = gamma .* corrections; gamma <- min(g, eta); corrections <- g ./ gamma
// (1 where gamma is 0).
void kl_project_box(DykstraState& state, const BoundSpec& eta);

// gamma_ij = exp(-(C_ij - min_k C_ik) / eps) with unit corrections. Each row
// is shifted by its minimum cost so no row underflows to zero.
DykstraState ibp_initial_state(const ProblemInstance& instance, double epsilon);

// ||after - before||_1 / ||before||_1 (0 when nothing changed).
double relative_l1_change(std::span<const double> before, std::span<const double> after);
// max_t |after_t - before_t| / max(|before_t|, |after_t|) over entries that
// are not zero or subnormal in both.
double max_relative_change(std::span<const double> before, std::span<const double> after);

struct IbpResult {
  TransportPlan plan;
  SolveReport report;
};

// Cycles rows, cols, box until the plan change over one cycle (per
// stop_measure) is at most outer_tol. Lower bounds are removed first (eps scaled by
// k_theta) and the plan lifted back. Throws kSizeCap above max_entries.
IbpResult ibp_solve(const ProblemInstance& instance, const IbpConfig& config = {},
                    const TraceSink& trace = {});

}  // namespace cot
