#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cot/newton.hpp"
#include "cot/problem.hpp"
#include "cot/report.hpp"
#include "cot/transport.hpp"

namespace cot {

// Dual scalings of the double regularized problem. The effective product in
// cell (i, j) is
//
//   phi_i * exp((alpha_abs_i + beta_abs_j - C_ij) / eps) * psi_j,
//
// so with zero offsets it is phi_i K_ij psi_j. Stabilization moves
// eps * ln(phi) into alpha_abs (and likewise for psi) and resets the scalings
// to one. Rows or columns with zero mass are pinned at phi_i = 0 / psi_j = 0.
struct DualPotentials {
  std::vector<double> phi;
  std::vector<double> psi;
  std::vector<double> alpha_abs;
  std::vector<double> beta_abs;

  // phi = psi = 1/n, zero offsets.
  static DualPotentials initial(std::size_t n, std::size_t m);
};

struct DrmConfig {
  double epsilon = 1e-3;
  std::size_t max_outer_iters = 100000;
  double outer_tol = 1e-5;
  double newton_tol = 1e-5;
  int newton_max_iters = 100;
  double stabilization_threshold = 1e20;
  bool stabilization_enabled = true;
  double time_budget_s = kNoTimeBudget;
  // 0 reads COT_NUM_THREADS.
  std::size_t threads = 1;
};

// Throws kInvalidArgument on a non-positive epsilon/tolerance or tau <= 1.
void validate_config(const DrmConfig& config);

// K_ij = exp(-C_ij / eps); may underflow to 0.
double kernel_entry(const CostSpec& cost, std::size_t i, std::size_t j, double epsilon);

// g_i(phi_i) = sum_j eta_ij / (1 + phi_i K_ij psi_j) - sum_j eta_ij + u_i
double g_eval(const ProblemInstance& instance, std::size_t i, double phi_i, std::span<const double> psi,
              double epsilon);
// g_i'(phi_i) = -sum_j eta_ij K_ij psi_j / (1 + phi_i K_ij psi_j)^2
double g_derivative(const ProblemInstance& instance, std::size_t i, double phi_i,
                    std::span<const double> psi, double epsilon);
// Column mirrors: f_j(psi_j) with phi frozen.
double f_eval(const ProblemInstance& instance, std::size_t j, double psi_j, std::span<const double> phi,
              double epsilon);
double f_derivative(const ProblemInstance& instance, std::size_t j, double psi_j,
                    std::span<const double> phi, double epsilon);

// The scalar equation for one row (or column) with the opposite duals frozen:
//
//   h(x) = mass - sum_k w_k * x c_k / (1 + x c_k),
//
// strictly decreasing in x > 0. In linear form c_k = K psi_k is stored
// directly; in log form ln c_k is stored and h is also exposed in t = ln x.
class DualEquation {
 public:
  enum class Form { kLinear, kLog };

  // `log_opposite` may carry precomputed ln(psi) (rows) or ln(phi)
  // (columns); it is computed on the fly when empty.
  void assign_row(const ProblemInstance& instance, const DualPotentials& duals, std::size_t i,
                  double epsilon, Form form, std::span<const double> log_opposite = {});
  void assign_col(const ProblemInstance& instance, const DualPotentials& duals, std::size_t j,
                  double epsilon, Form form, std::span<const double> log_opposite = {});

  double mass() const noexcept { return mass_; }
  std::size_t terms() const noexcept { return weight_.size(); }
  // Index (in the opposite dimension) of the first cell whose linear kernel
  // product underflowed while assigning, if any.
  std::optional<std::size_t> underflow() const noexcept { return underflow_; }

  ValueAndSlope at(double x) const;
  ValueAndSlope at_log(double t) const;

  // Doubles held by the scratch buffers.
  std::size_t scalars() const noexcept {
    return weight_.capacity() + coef_.capacity() + cost_.capacity() + bound_.capacity();
  }

 private:
  void compress(std::span<const double> opposite, std::span<const double> log_opposite,
                std::span<const double> opposite_offsets, double own_offset, double epsilon);

  Form form_ = Form::kLog;
  double mass_ = 0.0;
  std::vector<double> weight_;  // eta over cells with eta > 0
  std::vector<double> coef_;    // c_k (linear) or ln c_k (log)
  std::vector<double> cost_;    // scratch: one cost row/column
  std::vector<double> bound_;   // scratch: one eta row/column
  std::optional<std::size_t> underflow_;
};

struct SweepStats {
  std::size_t newton_iters = 0;
  // Doubles of scratch held during the sweep, summed over workers.
  std::size_t scratch_scalars = 0;
};

// Solves g_i(phi_i) = 0 for every row with psi frozen, warm-started at the
// current phi_i. Uses log coordinates when stabilization is enabled and the
// plain linear form otherwise. Rows with u_i = 0 are pinned at phi_i = 0 and
// rows whose mass fills their capacity at phi_i = +inf. Throws
// kNewtonFailure or kKernelUnderflow carrying the row index.
SweepStats half_sweep_rows(DualPotentials& duals, const ProblemInstance& instance, const DrmConfig& config);
SweepStats half_sweep_cols(DualPotentials& duals, const ProblemInstance& instance, const DrmConfig& config);

// alpha_abs += eps ln phi, beta_abs += eps ln psi, then phi = psi = 1
// (pinned lines keep 0 or +inf). Unconditional.
void stabilize(DualPotentials& duals, double epsilon);
// Runs stabilize() when max(phi) or max(psi) exceeds the threshold.
bool stabilize_if_needed(DualPotentials& duals, const DrmConfig& config);

// gamma_ij = eta_ij p_ij / (1 + p_ij) with p_ij the effective product.
TransportPlan recover_plan(const DualPotentials& duals, const ProblemInstance& instance, double epsilon);

struct DrmResult {
  TransportPlan plan;
  SolveReport report;
  // Duals of the instance actually iterated on (the reduced one when the
  // input had lower bounds).
  DualPotentials duals;
  std::optional<ReductionRecord> reduction;
};

// Alternating dual solve of the double regularized problem. Instances with
// nonzero lower bounds are reduced first (with eps scaled by k_theta so the
// regularized problems coincide) and the plan is lifted back.
DrmResult drm_solve(const ProblemInstance& instance, const DrmConfig& config = {},
                    const TraceSink& trace = {});

}  // namespace cot
