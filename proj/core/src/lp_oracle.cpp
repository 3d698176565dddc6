#include "cot/lp_oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cot/error.hpp"
#include "cot/tolerances.hpp"
#include "cot/transport.hpp"

namespace cot {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kIterationLimit:
      return "iteration-limit";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Primal network simplex on a graph whose last node is the artificial root.
// Arc states follow the usual sign convention so that state * reduced_cost < 0
// marks an improving non-tree arc.
class NetworkSimplex {
 public:
  static constexpr int kLower = 1;
  static constexpr int kTree = 0;
  static constexpr int kUpper = -1;
  static constexpr int kUp = 1;     // tree arc points from the node to its parent
  static constexpr int kDown = -1;  // tree arc points from the parent to the node

  NetworkSimplex(std::size_t nodes, std::vector<double> supply) : nodes_(nodes), supply_(std::move(supply)) {}

  void add_arc(std::size_t from, std::size_t to, double cost, double cap) {
    source_.push_back(from);
    target_.push_back(to);
    cost_.push_back(cost);
    cap_.push_back(cap);
  }

  std::size_t real_arcs() const { return real_arcs_; }
  double flow(std::size_t e) const { return flow_[e]; }
  double potential(std::size_t u) const { return pi_[u]; }
  double reduced_cost(std::size_t e) const { return cost_[e] + pi_[source_[e]] - pi_[target_[e]]; }
  std::size_t artificial_arc(std::size_t node) const { return real_arcs_ + node; }
  double capacity(std::size_t e) const { return cap_[e]; }
  double cost(std::size_t e) const { return cost_[e]; }
  std::size_t source(std::size_t e) const { return source_[e]; }
  std::size_t pivots() const { return pivots_; }

  // Builds the initial artificial basis. `art_cost` must exceed any simple
  // path cost through real arcs.
  void init(double art_cost) {
    real_arcs_ = cost_.size();
    root_ = nodes_;
    flow_.assign(real_arcs_, 0.0);
    state_.assign(real_arcs_, kLower);
    parent_.assign(nodes_ + 1, kNone);
    pred_.assign(nodes_ + 1, kNone);
    dir_.assign(nodes_ + 1, kUp);
    depth_.assign(nodes_ + 1, 0);
    pi_.assign(nodes_ + 1, 0.0);
    for (std::size_t u = 0; u < nodes_; ++u) {
      const std::size_t e = cost_.size();
      cap_.push_back(kInf);
      state_.push_back(kTree);
      parent_[u] = root_;
      pred_[u] = e;
      if (supply_[u] >= 0.0) {
        source_.push_back(u);
        target_.push_back(root_);
        cost_.push_back(0.0);
        flow_.push_back(supply_[u]);
      } else {
        source_.push_back(root_);
        target_.push_back(u);
        cost_.push_back(art_cost);
        flow_.push_back(-supply_[u]);
      }
    }
    rebuild_tree();
    block_ = std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(static_cast<double>(real_arcs_))));
    rc_tol_ = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, art_cost);
  }

  // Returns false when the pivot limit or the deadline stopped the search.
  template <class Deadline>
  bool run(std::size_t max_pivots, Deadline&& expired) {
    while (true) {
      const std::size_t entering = find_entering();
      if (entering == kNone) return true;
      if (pivots_ >= max_pivots || ((pivots_ & 255) == 0 && expired())) return false;
      pivot(entering);
      ++pivots_;
    }
  }

  // Recomputes tree-arc flows from the supplies and the non-tree flows,
  // leaves first, so that accumulated rounding is removed.
  void settle_tree_flows() {
    std::vector<double> excess(supply_.begin(), supply_.end());
    excess.push_back(0.0);
    for (std::size_t e = 0; e < cost_.size(); ++e) {
      if (state_[e] == kTree) continue;
      excess[source_[e]] -= flow_[e];
      excess[target_[e]] += flow_[e];
    }
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
      const std::size_t u = *it;
      if (u == root_) continue;
      const std::size_t e = pred_[u];
      flow_[e] = dir_[u] == kUp ? excess[u] : -excess[u];
      excess[parent_[u]] += excess[u];
    }
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::size_t find_entering() {
    const std::size_t count = real_arcs_;
    double best = -rc_tol_;
    std::size_t chosen = kNone;
    std::size_t budget = block_;
    for (std::size_t scanned = 0; scanned < count; ++scanned) {
      const std::size_t e = (next_arc_ + scanned) % count;
      if (state_[e] != kTree) {
        const double violation = state_[e] * reduced_cost(e);
        if (violation < best) {
          best = violation;
          chosen = e;
        }
      }
      if (--budget == 0) {
        if (chosen != kNone) {
          next_arc_ = (e + 1) % count;
          return chosen;
        }
        budget = block_;
      }
    }
    return chosen;
  }

  void pivot(std::size_t in_arc) {
    std::size_t first = source_[in_arc], second = target_[in_arc];
    if (state_[in_arc] == kUpper) std::swap(first, second);

    std::size_t a = source_[in_arc], b = target_[in_arc];
    while (a != b) {
      if (depth_[a] >= depth_[b]) {
        a = parent_[a];
      } else {
        b = parent_[b];
      }
    }
    const std::size_t join = a;

    // Cunningham's rule: the last blocking arc when walking the cycle in its
    // orientation starting at the join keeps the basis strongly feasible.
    double delta = cap_[in_arc];
    std::size_t u_out = kNone;
    int side = 0;
    bool out_to_lower = false;
    for (std::size_t u = first; u != join; u = parent_[u]) {
      const std::size_t e = pred_[u];
      const bool decreases = dir_[u] == kUp;
      const double room = decreases ? flow_[e] : cap_[e] - flow_[e];
      if (room < delta) {
        delta = room;
        u_out = u;
        side = 1;
        out_to_lower = decreases;
      }
    }
    for (std::size_t u = second; u != join; u = parent_[u]) {
      const std::size_t e = pred_[u];
      const bool decreases = dir_[u] == kDown;
      const double room = decreases ? flow_[e] : cap_[e] - flow_[e];
      if (room <= delta) {
        delta = room;
        u_out = u;
        side = 2;
        out_to_lower = decreases;
      }
    }

    if (delta > 0.0) {
      const double val = state_[in_arc] * delta;
      flow_[in_arc] += val;
      for (std::size_t u = source_[in_arc]; u != join; u = parent_[u]) {
        flow_[pred_[u]] -= dir_[u] * val;
        clamp(pred_[u]);
      }
      for (std::size_t u = target_[in_arc]; u != join; u = parent_[u]) {
        flow_[pred_[u]] += dir_[u] * val;
        clamp(pred_[u]);
      }
    }

    if (side == 0) {
      // The entering arc hits its own opposite bound.
      state_[in_arc] = -state_[in_arc];
      flow_[in_arc] = state_[in_arc] == kLower ? 0.0 : cap_[in_arc];
      return;
    }

    const std::size_t out_arc = pred_[u_out];
    state_[in_arc] = kTree;
    state_[out_arc] = out_to_lower ? kLower : kUpper;
    flow_[out_arc] = out_to_lower ? 0.0 : cap_[out_arc];
    clamp(in_arc);

    // Re-hang the cut subtree: reverse the path u_in .. u_out.
    const std::size_t u_in = side == 1 ? first : second;
    const std::size_t v_in = side == 1 ? second : first;
    std::size_t prev = v_in, prev_arc = in_arc, u = u_in;
    while (true) {
      const std::size_t next = parent_[u], next_arc = pred_[u];
      parent_[u] = prev;
      pred_[u] = prev_arc;
      if (u == u_out) break;
      prev = u;
      prev_arc = next_arc;
      u = next;
    }
    rebuild_tree();
  }

  void clamp(std::size_t e) { flow_[e] = std::clamp(flow_[e], 0.0, cap_[e]); }

  // Depths, arc directions and potentials from the parent pointers.
  void rebuild_tree() {
    std::vector<std::size_t> head(nodes_ + 1, kNone), next(nodes_ + 1, kNone);
    for (std::size_t u = nodes_ + 1; u-- > 0;) {
      if (u == root_) continue;
      next[u] = head[parent_[u]];
      head[parent_[u]] = u;
    }
    order_.clear();
    order_.push_back(root_);
    depth_[root_] = 0;
    pi_[root_] = 0.0;
    for (std::size_t k = 0; k < order_.size(); ++k) {
      const std::size_t p = order_[k];
      for (std::size_t c = head[p]; c != kNone; c = next[c]) {
        const std::size_t e = pred_[c];
        dir_[c] = source_[e] == c ? kUp : kDown;
        pi_[c] = dir_[c] == kUp ? pi_[p] - cost_[e] : pi_[p] + cost_[e];
        depth_[c] = depth_[p] + 1;
        order_.push_back(c);
      }
    }
  }

  std::size_t nodes_;
  std::vector<double> supply_;
  std::vector<std::size_t> source_, target_;
  std::vector<double> cost_, cap_, flow_;
  std::vector<int> state_;
  std::vector<std::size_t> parent_, pred_, depth_, order_;
  std::vector<int> dir_;
  std::vector<double> pi_;
  std::size_t root_ = 0;
  std::size_t real_arcs_ = 0;
  std::size_t block_ = 10;
  std::size_t next_arc_ = 0;
  std::size_t pivots_ = 0;
  double rc_tol_ = 0.0;
};

}  // namespace

LpSolution lp_solve_exact(const ProblemInstance& instance, const LpOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - started).count(); };

  const std::size_t n = instance.n(), m = instance.m();
  const double variables = static_cast<double>(n) * static_cast<double>(m);
  if (variables > static_cast<double>(options.max_variables)) {
    throw Error(ErrorCode::kSizeCap, "LP has " + std::to_string(static_cast<std::size_t>(variables)) +
                                         " variables, above the cap of " + std::to_string(options.max_variables));
  }

  LpSolution out;
  out.plan.gamma = Matrix(n, m);
  const auto& [u, v] = instance.marginals();
  const CapacityBounds& bounds = instance.bounds();

  // Shift by theta: x = gamma - theta with 0 <= x <= eta - theta.
  std::vector<double> supply(n + m, 0.0);
  std::vector<double> cost_row(m), theta_row(m), eta_row(m);
  double base_cost = 0.0, max_cost = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    instance.cost().fill_row(i, cost_row);
    bounds.lower.fill_row(i, theta_row);
    for (std::size_t j = 0; j < m; ++j) {
      base_cost += cost_row[j] * theta_row[j];
      supply[i] -= theta_row[j];
      supply[n + j] += theta_row[j];
      max_cost = std::max(max_cost, std::abs(cost_row[j]));
    }
  }
  for (std::size_t i = 0; i < n; ++i) supply[i] += u[i];
  for (std::size_t j = 0; j < m; ++j) supply[n + j] -= v[j];

  NetworkSimplex simplex(n + m, supply);
  std::vector<std::size_t> arc_row, arc_col;
  for (std::size_t i = 0; i < n; ++i) {
    instance.cost().fill_row(i, cost_row);
    bounds.lower.fill_row(i, theta_row);
    bounds.upper.fill_row(i, eta_row);
    for (std::size_t j = 0; j < m; ++j) {
      const double cap = eta_row[j] - theta_row[j];
      if (cap < 0.0) {
        out.status = LpStatus::kInfeasible;
        out.message = "lower bound exceeds upper bound at (" + std::to_string(i) + ", " + std::to_string(j) + ")";
        out.wall_time_s = elapsed();
        return out;
      }
      if (cap == 0.0) continue;
      simplex.add_arc(i, n + j, cost_row[j], cap);
      arc_row.push_back(i);
      arc_col.push_back(j);
    }
  }
  const double art_cost = (max_cost + 1.0) * static_cast<double>(n + m + 1);
  simplex.init(art_cost);

  const bool finished =
      simplex.run(options.max_pivots, [&] { return elapsed() > options.time_budget_s; });
  simplex.settle_tree_flows();
  out.pivots = simplex.pivots();

  double primal = base_cost;
  for (std::size_t e = 0; e < simplex.real_arcs(); ++e) {
    out.plan.gamma(arc_row[e], arc_col[e]) = simplex.flow(e);
    primal += simplex.cost(e) * simplex.flow(e);
  }
  for (std::size_t i = 0; i < n; ++i) {
    bounds.lower.fill_row(i, theta_row);
    for (std::size_t j = 0; j < m; ++j) out.plan.gamma(i, j) += theta_row[j];
  }
  out.objective = primal;

  // Artificial flow left in the basis means the constraints cannot all hold.
  double total_mass = 0.0;
  for (double x : u) total_mass += x;
  const double art_tol = tol::kLpCertificate * std::max(1.0, total_mass);
  for (std::size_t node = 0; node < n + m; ++node) {
    const double f = simplex.flow(simplex.artificial_arc(node));
    if (f > art_tol) {
      out.status = finished ? LpStatus::kInfeasible : LpStatus::kIterationLimit;
      if (finished) {
        out.message = node < n ? "row " + std::to_string(node) + " cannot place mass " + std::to_string(f)
                               : "column " + std::to_string(node - n) + " cannot receive mass " + std::to_string(f);
      }
      out.wall_time_s = elapsed();
      return out;
    }
  }

  double dual = base_cost;
  for (std::size_t node = 0; node < n + m; ++node) dual -= supply[node] * simplex.potential(node);
  for (std::size_t e = 0; e < simplex.real_arcs(); ++e) {
    const double rc = simplex.reduced_cost(e);
    if (rc < 0.0) dual += simplex.capacity(e) * rc;
  }
  out.duality_gap = std::abs(primal - dual);
  const bool certified = out.duality_gap <= tol::kLpCertificate * std::max(1.0, std::abs(primal));
  out.status = finished && certified ? LpStatus::kOptimal : LpStatus::kIterationLimit;
  out.wall_time_s = elapsed();
  return out;
}

RelativeError relative_error(const TransportPlan& candidate, const ProblemInstance& instance,
                             const LpSolution& oracle) {
  if (oracle.status != LpStatus::kOptimal) {
    throw Error(ErrorCode::kInvalidArgument, "oracle is not optimal");
  }
  const double gap = std::abs(objective(instance.cost(), candidate) - oracle.objective);
  if (oracle.objective == 0.0) return {gap, true};
  return {gap / std::abs(oracle.objective), false};
}

double plan_gap(const TransportPlan& candidate, const LpSolution& oracle) {
  const auto a = candidate.gamma.values();
  const auto b = oracle.plan.gamma.values();
  if (a.size() != b.size()) throw Error(ErrorCode::kDimensionMismatch, "plan shapes differ");
  double diff = 0.0, norm = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    diff += (a[k] - b[k]) * (a[k] - b[k]);
    norm += b[k] * b[k];
  }
  return norm > 0.0 ? std::sqrt(diff / norm) : std::sqrt(diff);
}

}  // namespace cot
