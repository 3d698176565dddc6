#include "cot/cli/bench.hpp"

#include <fmt/format.h>

#include <map>
#include <optional>
#include <utility>

#include "cot/error.hpp"
#include "json.hpp"

namespace cot::cli {

std::string Cell::text() const {
  switch (state) {
    case State::kValue:
      return fmt::format("{:.6g}", value);
    case State::kNotAvailable:
      return "N/A";
    case State::kFailed:
      return "-";
  }
  return "-";
}

namespace {

struct Tally {
  double time_sum = 0.0;
  std::size_t timed = 0;
  double err_sum = 0.0;
  std::size_t scored = 0;
  bool had_oracle = false;
  std::size_t converged = 0;
};

Cell mean_or_failed(double sum, std::size_t count) {
  return count == 0 ? Cell::failed() : Cell::of(sum / static_cast<double>(count));
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchOptions& options) {
  if (options.trials == 0) throw Error(ErrorCode::kInvalidArgument, "trials must be >= 1");
  std::vector<BenchRow> rows;
  for (std::size_t size : options.sizes) {
    // (solver, epsilon index) -> tally; the LP ignores epsilon and is run once
    // per trial, then repeated for every epsilon in the table.
    std::map<std::pair<SolverKind, std::size_t>, Tally> tallies;
    for (std::size_t t = 0; t < options.trials; ++t) {
      GenSpec spec;
      spec.family = options.family;
      spec.n = size;
      spec.seed = options.seed + t;
      if (is_uniform(options.family)) {
        spec.lambda = options.param;
      } else {
        spec.delta = options.param;
      }
      std::optional<GeneratedInstance> generated;
      try {
        generated.emplace(generate(spec));
      } catch (const Error&) {
        continue;  // counted as failed for every solver
      }
      const ProblemInstance& instance = generated->instance;
      std::optional<LpSolution> oracle;
      try {
        oracle = oracle_for(instance, options.flags);
      } catch (const Error&) {
      }

      for (SolverKind kind : options.solvers) {
        const std::size_t eps_count = kind == SolverKind::kLp ? 1 : options.epsilons.size();
        for (std::size_t e = 0; e < eps_count; ++e) {
          Tally& tally = tallies[{kind, e}];
          tally.had_oracle = tally.had_oracle || oracle.has_value();
          SolverFlags flags = options.flags;
          flags.epsilon = options.epsilons[e];
          std::optional<SolveOutcome> outcome;
          try {
            if (kind == SolverKind::kLp && oracle) {
              outcome.emplace();
              outcome->solver = kind;
              outcome->plan = oracle->plan;
              outcome->objective = oracle->objective;
              outcome->converged = true;
              outcome->iterations = oracle->pivots;
              outcome->wall_time_s = oracle->wall_time_s;
            } else {
              outcome = run_solver(kind, instance, flags);
            }
          } catch (const Error&) {
            continue;
          }
          if (outcome->timed_out) continue;
          if (outcome->converged) ++tally.converged;
          tally.time_sum += options.deterministic_times ? static_cast<double>(outcome->iterations)
                                                        : outcome->wall_time_s;
          ++tally.timed;
          if (oracle) {
            tally.err_sum += relative_error(outcome->plan, instance, *oracle).value;
            ++tally.scored;
          }
        }
      }
    }

    const auto ibp_time = [&](std::size_t e) -> std::optional<double> {
      auto it = tallies.find({SolverKind::kIbp, e});
      if (it == tallies.end() || it->second.timed == 0) return std::nullopt;
      return it->second.time_sum / static_cast<double>(it->second.timed);
    };

    for (SolverKind kind : options.solvers) {
      for (std::size_t e = 0; e < options.epsilons.size(); ++e) {
        const Tally& tally = tallies[{kind, kind == SolverKind::kLp ? 0 : e}];
        BenchRow row;
        row.family = to_string(options.family);
        row.param = options.param;
        row.size = size;
        row.solver = to_string(kind);
        row.epsilon = options.epsilons[e];
        row.trials = options.trials;
        row.time_s = mean_or_failed(tally.time_sum, tally.timed);
        if (!tally.had_oracle) {
          row.rel_err = Cell::not_available();
        } else {
          row.rel_err = mean_or_failed(tally.err_sum, tally.scored);
        }
        const std::optional<double> base = ibp_time(e);
        if (!base) {
          row.speedup = Cell::not_available();
        } else if (row.time_s.state != Cell::State::kValue) {
          row.speedup = Cell::failed();
        } else {
          row.speedup = row.time_s.value > 0.0 ? Cell::of(*base / row.time_s.value) : Cell::not_available();
        }
        row.converged_frac = static_cast<double>(tally.converged) / static_cast<double>(options.trials);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = kBenchColumns;
  out += '\n';
  for (const BenchRow& r : rows) {
    out += fmt::format("{},{:g},{},{},{:g},{},{},{},{:g},{}\n", r.family, r.param, r.size, r.solver, r.epsilon,
                       r.time_s.text(), r.rel_err.text(), r.speedup.text(), r.converged_frac, r.trials);
  }
  return out;
}

std::string bench_json(const std::vector<BenchRow>& rows) {
  auto cell = [](const Cell& c) -> nlohmann::ordered_json {
    if (c.state == Cell::State::kValue) return c.value;
    return c.text();
  };
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const BenchRow& r : rows) {
    out.push_back({{"family", r.family},
                   {"param", r.param},
                   {"size", r.size},
                   {"solver", r.solver},
                   {"epsilon", r.epsilon},
                   {"time_s", cell(r.time_s)},
                   {"rel_err", cell(r.rel_err)},
                   {"speedup", cell(r.speedup)},
                   {"converged_frac", r.converged_frac},
                   {"trials", r.trials}});
  }
  return out.dump(2) + "\n";
}

}  // namespace cot::cli
