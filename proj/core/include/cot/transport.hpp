#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cot/problem.hpp"

namespace cot {

enum class ViolationKind {
  kNegativeMass,    // u_i < 0 (index i) or v_j < 0 (index N + j)
  kMassBalance,     // sum u or sum v differs from 1 (index 0 for u, 1 for v)
  kNegativeBound,   // theta_ij < 0, flattened index i * M + j
  kBoundOrder,      // theta_ij > eta_ij, flattened index
  kRowBelowLower,   // u_i < sum_j theta_ij
  kRowAboveUpper,   // u_i > sum_j eta_ij
  kColBelowLower,   // v_j < sum_i theta_ij
  kColAboveUpper,   // v_j > sum_i eta_ij
};

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::size_t index;
  double amount;  // how far past the limit
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  std::string summary(std::size_t max_items = 5) const;
};

// Checks theta 1 <= u <= eta 1, theta^T 1 <= v <= eta^T 1, mass balance, and
// entrywise 0 <= theta <= eta, all within tol::kFeasibility.
ValidationResult validate_feasibility(const ProblemInstance& instance);

// Lower-bound elimination. The reduced instance has theta' = 0, costs scaled
// by k, and eta', u', v' shifted by theta and divided by k, where
// k = 1 - sum(theta).
struct ReductionRecord {
  double k_theta = 1.0;
  BoundSpec theta_snapshot;
  std::size_t n = 0;
  std::size_t m = 0;
};

struct Reduction {
  ProblemInstance reduced;
  ReductionRecord record;
};

// Throws kInfeasible if k <= 0.
Reduction reduce_to_upper_bounded(const ProblemInstance& instance);

// gamma = k gamma' + theta.
TransportPlan lift_plan(const TransportPlan& reduced_plan, const ReductionRecord& record);
// gamma' = (gamma - theta) / k.
TransportPlan reduce_plan(const TransportPlan& plan, const ReductionRecord& record);

double objective(const CostSpec& cost, const TransportPlan& plan);

// <C, gamma> + eps <gamma - theta, ln(gamma - theta)> + eps <eta - gamma, ln(eta - gamma)>
// using 0 ln 0 = 0. Throws kDomain if any entry leaves [theta, eta].
double regularized_objective(const ProblemInstance& instance, const TransportPlan& plan,
                             double epsilon);

struct MarginalResiduals {
  double row = 0.0;  // || gamma 1 - u ||_inf
  double col = 0.0;  // || gamma^T 1 - v ||_inf
};

MarginalResiduals marginal_residuals(const TransportPlan& plan, const Marginals& marginals);

// Largest violation of theta <= gamma <= eta (0 when the plan is inside).
double bound_violation(const TransportPlan& plan, const CapacityBounds& bounds);

}  // namespace cot
