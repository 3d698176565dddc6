#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "cot/problem.hpp"

namespace cot {

// JSON instance documents. Schema (see docs/instance_format.md):
//
//   { "n": N, "m": M,
//     "cost":  {"variant": "dense", "values": [[...], ...]}
//            | {"variant": "grid1d", "h": h}
//            | {"variant": "grid2d", "side": s, "hx": hx, "hy": hy},
//     "u": [...], "v": [...],
//     "lower": <bound>, "upper": <bound> }
//
//   <bound> = {"variant": "uniform", "value": c}
//           | {"variant": "dense", "values": [[...], ...]}
//           | {"variant": "rank_one_plus_dense", "a": [...], "b": [...],
//              "scale": s, "delta": d, "noise": [[...], ...] | null}
//
// Costs accept an optional "scale" multiplier. Parse failures throw
// Error(kParse); shape problems throw Error(kDimensionMismatch).
std::string instance_to_json(const ProblemInstance& instance, int indent = -1);
ProblemInstance instance_from_json(std::string_view text);

ProblemInstance load_instance(const std::filesystem::path& path);
void save_instance(const ProblemInstance& instance, const std::filesystem::path& path);

}  // namespace cot
