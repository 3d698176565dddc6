#include "cot/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <variant>

#include "cot/error.hpp"
#include "cot/tolerances.hpp"

namespace cot {

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kNegativeMass: return "negative mass";
    case ViolationKind::kMassBalance: return "mass balance";
    case ViolationKind::kNegativeBound: return "negative lower bound";
    case ViolationKind::kBoundOrder: return "lower bound above upper bound";
    case ViolationKind::kRowBelowLower: return "row mass below lower-bound row sum";
    case ViolationKind::kRowAboveUpper: return "row mass above capacity row sum";
    case ViolationKind::kColBelowLower: return "column mass below lower-bound column sum";
    case ViolationKind::kColAboveUpper: return "column mass above capacity column sum";
  }
  return "unknown";
}

std::string ValidationResult::summary(std::size_t max_items) const {
  if (ok()) return "ok";
  std::ostringstream os;
  os << violations.size() << " violation(s):";
  for (std::size_t k = 0; k < std::min(max_items, violations.size()); ++k) {
    const Violation& v = violations[k];
    os << " [" << to_string(v.kind) << " at " << v.index << ", by " << v.amount << "]";
  }
  if (violations.size() > max_items) os << " ...";
  return os.str();
}

ValidationResult validate_feasibility(const ProblemInstance& instance) {
  const std::size_t n = instance.n();
  const std::size_t m = instance.m();
  const auto& [u, v] = instance.marginals();
  const auto& bounds = instance.bounds();
  ValidationResult result;
  auto flag = [&](ViolationKind kind, std::size_t index, double amount) {
    result.violations.push_back({kind, index, amount});
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (u[i] < 0.0) flag(ViolationKind::kNegativeMass, i, -u[i]);
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (v[j] < 0.0) flag(ViolationKind::kNegativeMass, n + j, -v[j]);
  }
  const double su = std::accumulate(u.begin(), u.end(), 0.0);
  const double sv = std::accumulate(v.begin(), v.end(), 0.0);
  if (std::abs(su - 1.0) > tol::kMassBalance) flag(ViolationKind::kMassBalance, 0, std::abs(su - 1.0));
  if (std::abs(sv - 1.0) > tol::kMassBalance) flag(ViolationKind::kMassBalance, 1, std::abs(sv - 1.0));

  std::vector<double> theta_row(m), eta_row(m);
  std::vector<double> theta_col_sum(m, 0.0), eta_col_sum(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    bounds.lower.fill_row(i, theta_row);
    bounds.upper.fill_row(i, eta_row);
    double theta_sum = 0.0, eta_sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (theta_row[j] < -tol::kFeasibility) flag(ViolationKind::kNegativeBound, i * m + j, -theta_row[j]);
      if (theta_row[j] > eta_row[j] + tol::kFeasibility) {
        flag(ViolationKind::kBoundOrder, i * m + j, theta_row[j] - eta_row[j]);
      }
      theta_sum += theta_row[j];
      eta_sum += eta_row[j];
      theta_col_sum[j] += theta_row[j];
      eta_col_sum[j] += eta_row[j];
    }
    if (u[i] < theta_sum - tol::kFeasibility) flag(ViolationKind::kRowBelowLower, i, theta_sum - u[i]);
    if (u[i] > eta_sum + tol::kFeasibility) flag(ViolationKind::kRowAboveUpper, i, u[i] - eta_sum);
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (v[j] < theta_col_sum[j] - tol::kFeasibility) {
      flag(ViolationKind::kColBelowLower, j, theta_col_sum[j] - v[j]);
    }
    if (v[j] > eta_col_sum[j] + tol::kFeasibility) {
      flag(ViolationKind::kColAboveUpper, j, v[j] - eta_col_sum[j]);
    }
  }
  return result;
}

namespace {

// Clears rounding noise below zero produced by the shift u - sum(theta).
double shifted_mass(double mass, double theta_sum, double k) {
  const double x = (mass - theta_sum) / k;
  return (x < 0.0 && x > -tol::kFeasibility) ? 0.0 : x;
}

}  // namespace

Reduction reduce_to_upper_bounded(const ProblemInstance& instance) {
  const std::size_t n = instance.n();
  const std::size_t m = instance.m();
  const auto& bounds = instance.bounds();
  const double theta_total = bounds.lower.total(n, m);
  const double k = 1.0 - theta_total;
  if (!(k > 0.0)) {
    throw Error(ErrorCode::kInfeasible,
                "lower bounds carry all the mass (k_theta = " + std::to_string(k) + ")");
  }

  Marginals reduced_marginals;
  reduced_marginals.u.resize(n);
  reduced_marginals.v.resize(m);
  std::vector<double> theta_row(m), theta_col_sum(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    bounds.lower.fill_row(i, theta_row);
    double row = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      row += theta_row[j];
      theta_col_sum[j] += theta_row[j];
    }
    reduced_marginals.u[i] = shifted_mass(instance.marginals().u[i], row, k);
  }
  for (std::size_t j = 0; j < m; ++j) {
    reduced_marginals.v[j] = shifted_mass(instance.marginals().v[j], theta_col_sum[j], k);
  }

  BoundSpec upper;
  const auto* lower_uniform = std::get_if<UniformBound>(&bounds.lower.form());
  const auto* upper_uniform = std::get_if<UniformBound>(&bounds.upper.form());
  if (lower_uniform && lower_uniform->value == 0.0) {
    upper = bounds.upper.scaled(1.0 / k);
  } else if (lower_uniform && upper_uniform) {
    upper = BoundSpec::uniform((upper_uniform->value - lower_uniform->value) / k);
  } else {
    Matrix eta = bounds.upper.materialize(n, m);
    for (std::size_t i = 0; i < n; ++i) {
      bounds.lower.fill_row(i, theta_row);
      auto row = eta.row(i);
      for (std::size_t j = 0; j < m; ++j) row[j] = std::max(0.0, row[j] - theta_row[j]) / k;
    }
    upper = BoundSpec::dense(std::move(eta));
  }

  ProblemInstance reduced(instance.cost().scaled(k), std::move(reduced_marginals),
                          CapacityBounds{BoundSpec::zero(), std::move(upper)});
  return Reduction{std::move(reduced), ReductionRecord{k, bounds.lower, n, m}};
}

TransportPlan lift_plan(const TransportPlan& reduced_plan, const ReductionRecord& record) {
  const Matrix& g = reduced_plan.gamma;
  if (g.rows() != record.n || g.cols() != record.m) {
    throw Error(ErrorCode::kDimensionMismatch, "plan shape does not match reduction record");
  }
  TransportPlan out{Matrix(record.n, record.m)};
  std::vector<double> theta_row(record.m);
  for (std::size_t i = 0; i < record.n; ++i) {
    record.theta_snapshot.fill_row(i, theta_row);
    const auto src = g.row(i);
    auto dst = out.gamma.row(i);
    for (std::size_t j = 0; j < record.m; ++j) dst[j] = record.k_theta * src[j] + theta_row[j];
  }
  return out;
}

TransportPlan reduce_plan(const TransportPlan& plan, const ReductionRecord& record) {
  const Matrix& g = plan.gamma;
  if (g.rows() != record.n || g.cols() != record.m) {
    throw Error(ErrorCode::kDimensionMismatch, "plan shape does not match reduction record");
  }
  TransportPlan out{Matrix(record.n, record.m)};
  std::vector<double> theta_row(record.m);
  for (std::size_t i = 0; i < record.n; ++i) {
    record.theta_snapshot.fill_row(i, theta_row);
    const auto src = g.row(i);
    auto dst = out.gamma.row(i);
    for (std::size_t j = 0; j < record.m; ++j) dst[j] = (src[j] - theta_row[j]) / record.k_theta;
  }
  return out;
}

double objective(const CostSpec& cost, const TransportPlan& plan) {
  const Matrix& g = plan.gamma;
  if (!cost.fits(g.rows(), g.cols())) {
    throw Error(ErrorCode::kDimensionMismatch, "cost shape does not match plan");
  }
  std::vector<double> c(g.cols());
  double total = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    cost.fill_row(i, c);
    const auto row = g.row(i);
    for (std::size_t j = 0; j < g.cols(); ++j) total += c[j] * row[j];
  }
  return total;
}

namespace {

double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

}  // namespace

double regularized_objective(const ProblemInstance& instance, const TransportPlan& plan,
                             double epsilon) {
  const Matrix& g = plan.gamma;
  const std::size_t n = instance.n();
  const std::size_t m = instance.m();
  if (g.rows() != n || g.cols() != m) {
    throw Error(ErrorCode::kDimensionMismatch, "plan shape does not match instance");
  }
  const double linear = objective(instance.cost(), plan);
  if (epsilon == 0.0) return linear;

  std::vector<double> theta_row(m), eta_row(m);
  double entropy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    instance.bounds().lower.fill_row(i, theta_row);
    instance.bounds().upper.fill_row(i, eta_row);
    const auto row = g.row(i);
    for (std::size_t j = 0; j < m; ++j) {
      const double below = row[j] - theta_row[j];
      const double above = eta_row[j] - row[j];
      if (below < 0.0 || above < 0.0) {
        throw Error(ErrorCode::kDomain, "plan entry outside [theta, eta]", i * m + j);
      }
      entropy += xlogx(below) + xlogx(above);
    }
  }
  return linear + epsilon * entropy;
}

MarginalResiduals marginal_residuals(const TransportPlan& plan, const Marginals& marginals) {
  const Matrix& g = plan.gamma;
  if (g.rows() != marginals.u.size() || g.cols() != marginals.v.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "plan shape does not match marginals");
  }
  MarginalResiduals res;
  std::vector<double> col_sums(g.cols(), 0.0);
  for (std::size_t i = 0; i < g.rows(); ++i) {
    const auto row = g.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < g.cols(); ++j) {
      s += row[j];
      col_sums[j] += row[j];
    }
    res.row = std::max(res.row, std::abs(s - marginals.u[i]));
  }
  for (std::size_t j = 0; j < g.cols(); ++j) {
    res.col = std::max(res.col, std::abs(col_sums[j] - marginals.v[j]));
  }
  return res;
}

double bound_violation(const TransportPlan& plan, const CapacityBounds& bounds) {
  const Matrix& g = plan.gamma;
  std::vector<double> theta_row(g.cols()), eta_row(g.cols());
  double worst = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    bounds.lower.fill_row(i, theta_row);
    bounds.upper.fill_row(i, eta_row);
    const auto row = g.row(i);
    for (std::size_t j = 0; j < g.cols(); ++j) {
      worst = std::max({worst, theta_row[j] - row[j], row[j] - eta_row[j]});
    }
  }
  return worst;
}

}  // namespace cot
