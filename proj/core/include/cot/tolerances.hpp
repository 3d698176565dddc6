#pragma once

// Numerical tolerances shared by every module. All sit at the double
// precision noise floor unless noted.
namespace cot::tol {

inline constexpr double kFeasibility = 1e-12;
inline constexpr double kMassBalance = 1e-12;
inline constexpr double kRoundTrip = 1e-12;
// Total mass of a reduced instance after the lower-bound elimination.
inline constexpr double kReducedMass = 1e-10;
// Relative margin required between a marginal and its row/column capacity
// before the dual solver accepts the instance.
inline constexpr double kStrictMargin = 1e-10;
// Duality gap and primal feasibility of an exact LP solution.
inline constexpr double kLpCertificate = 1e-9;

}  // namespace cot::tol
