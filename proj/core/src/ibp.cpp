#include "cot/ibp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cot/error.hpp"
#include "cot/transport.hpp"

namespace cot {

void kl_project_rows(DykstraState& state, std::span<const double> u) {
  Matrix& plan = state.plan;
  if (u.size() != plan.rows()) throw Error(ErrorCode::kDimensionMismatch, "u does not match plan rows");
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    auto row = plan.row(i);
    double sum = 0.0;
    for (double x : row) sum += x;
    if (sum <= 0.0) {
      if (u[i] > 0.0) {
        throw Error(ErrorCode::kDegenerate, "row " + std::to_string(i) + " has zero mass in the iterate", i);
      }
      continue;
    }
    const double factor = u[i] / sum;
    for (double& x : row) x *= factor;
  }
  state.cycle_position = (state.cycle_position + 1) % 3;
}

void kl_project_cols(DykstraState& state, std::span<const double> v) {
  Matrix& plan = state.plan;
  if (v.size() != plan.cols()) throw Error(ErrorCode::kDimensionMismatch, "v does not match plan columns");
  std::vector<double> sums(plan.cols(), 0.0);
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    auto row = plan.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) sums[j] += row[j];
  }
  for (std::size_t j = 0; j < sums.size(); ++j) {
    if (sums[j] <= 0.0) {
      if (v[j] > 0.0) {
        throw Error(ErrorCode::kDegenerate, "column " + std::to_string(j) + " has zero mass in the iterate", j);
      }
      sums[j] = 0.0;
    } else {
      sums[j] = v[j] / sums[j];
    }
  }
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    auto row = plan.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] *= sums[j];
  }
  state.cycle_position = (state.cycle_position + 1) % 3;
}

void kl_project_box(DykstraState& state, const BoundSpec& eta) {
  Matrix& plan = state.plan;
  Matrix& corr = state.corrections;
  std::vector<double> bound(plan.cols());
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    eta.fill_row(i, bound);
    auto row = plan.row(i);
    auto c = corr.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      const double tilde = row[j] * c[j];
      const double kept = std::min(tilde, bound[j]);
      row[j] = kept;
      c[j] = kept > 0.0 ? tilde / kept : 1.0;
    }
  }
  state.cycle_position = (state.cycle_position + 1) % 3;
}

DykstraState ibp_initial_state(const ProblemInstance& instance, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be > 0");
  DykstraState state{Matrix(instance.n(), instance.m()), Matrix(instance.n(), instance.m(), 1.0), 0};
  for (std::size_t i = 0; i < instance.n(); ++i) {
    auto row = state.plan.row(i);
    instance.cost().fill_row(i, row);
    const double lowest = *std::min_element(row.begin(), row.end());
    for (double& x : row) x = std::exp(-(x - lowest) / epsilon);
  }
  return state;
}

namespace {

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

}  // namespace

double relative_l1_change(std::span<const double> before, std::span<const double> after) {
  double diff = 0.0, base = 0.0;
  for (std::size_t t = 0; t < before.size(); ++t) {
    diff += std::abs(after[t] - before[t]);
    base += std::abs(before[t]);
  }
  if (diff == 0.0) return 0.0;
  return base > 0.0 ? diff / base : std::numeric_limits<double>::infinity();
}

double max_relative_change(std::span<const double> before, std::span<const double> after) {
  double worst = 0.0;
  for (std::size_t t = 0; t < before.size(); ++t) {
    const double scale = std::max(std::abs(before[t]), std::abs(after[t]));
    if (scale < std::numeric_limits<double>::min()) continue;
    worst = std::max(worst, std::abs(after[t] - before[t]) / scale);
  }
  return worst;
}

IbpResult ibp_solve(const ProblemInstance& instance, const IbpConfig& config, const TraceSink& trace) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - started).count(); };

  if (!(config.epsilon > 0.0) || !(config.outer_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon and outer_tol must be > 0");
  }
  const double cells = static_cast<double>(instance.n()) * static_cast<double>(instance.m());
  if (cells > static_cast<double>(config.max_entries)) {
    throw Error(ErrorCode::kSizeCap, "IBP needs " + std::to_string(static_cast<std::size_t>(cells)) +
                                         " cells, above the cap of " + std::to_string(config.max_entries));
  }
  if (const ValidationResult check = validate_feasibility(instance); !check.ok()) {
    throw Error(ErrorCode::kInfeasible, "instance is infeasible: " + check.summary());
  }

  std::optional<Reduction> reduction;
  double epsilon = config.epsilon;
  double objective_offset = 0.0;
  if (instance.has_lower_bounds()) {
    reduction = reduce_to_upper_bounded(instance);
    epsilon *= reduction->record.k_theta;
    objective_offset = lower_bound_cost(instance);
  }
  const ProblemInstance& work = reduction ? reduction->reduced : instance;
  const double k = reduction ? reduction->record.k_theta : 1.0;

  IbpResult result;
  SolveReport& report = result.report;
  DykstraState state = ibp_initial_state(work, epsilon);
  Matrix previous = state.plan;
  report.state_scalars = state.plan.size() + state.corrections.size() + previous.size();

  for (std::size_t iter = 1; iter <= config.max_iters; ++iter) {
    kl_project_rows(state, work.marginals().u);
    kl_project_cols(state, work.marginals().v);
    kl_project_box(state, work.bounds().upper);

    const double delta = config.stop_measure == IbpStopMeasure::kRelativeL1
                             ? relative_l1_change(previous.values(), state.plan.values())
                             : max_relative_change(previous.values(), state.plan.values());
    std::copy(state.plan.values().begin(), state.plan.values().end(), previous.values().begin());
    report.outer_residual_history.push_back(delta);
    report.outer_iters = iter;

    if (trace) {
      const TransportPlan view{state.plan};
      const MarginalResiduals res = marginal_residuals(view, work.marginals());
      TraceRecord record;
      record.iteration = iter;
      record.time_s = elapsed();
      record.delta_outer = delta;
      record.row_residual = k * res.row;
      record.col_residual = k * res.col;
      record.objective = objective(work.cost(), view) + objective_offset;
      trace(record);
    }

    if (delta <= config.outer_tol) {
      report.converged = true;
      report.stop_reason = StopReason::kTolerance;
      break;
    }
    if (elapsed() > config.time_budget_s) {
      report.stop_reason = StopReason::kTimeBudget;
      break;
    }
  }

  result.plan = TransportPlan{std::move(state.plan)};
  if (reduction) result.plan = lift_plan(result.plan, reduction->record);
  const MarginalResiduals res = marginal_residuals(result.plan, instance.marginals());
  report.final_row_residual = res.row;
  report.final_col_residual = res.col;
  report.wall_time_s = elapsed();
  return result;
}

}  // namespace cot
