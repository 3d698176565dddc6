#include "cot/instance_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cot/error.hpp"

namespace cot {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  return Matrix::from_rows(j.get<std::vector<std::vector<double>>>());
}

json cost_to_json(const CostSpec& cost) {
  json out = std::visit(Overloaded{
                            [](const DenseCost& c) {
                              return json{{"variant", "dense"}, {"values", matrix_to_json(c.values)}};
                            },
                            [](const Grid1DCost& c) { return json{{"variant", "grid1d"}, {"h", c.h}}; },
                            [](const Grid2DCost& c) {
                              return json{{"variant", "grid2d"}, {"side", c.side}, {"hx", c.hx}, {"hy", c.hy}};
                            },
                        },
                        cost.form());
  if (cost.scale() != 1.0) out["scale"] = cost.scale();
  return out;
}

CostSpec cost_from_json(const json& j) {
  const std::string variant = j.at("variant").get<std::string>();
  const double scale = j.value("scale", 1.0);
  if (variant == "dense") return CostSpec(DenseCost{matrix_from_json(j.at("values"))}, scale);
  if (variant == "grid1d") return CostSpec(Grid1DCost{j.at("h").get<double>()}, scale);
  if (variant == "grid2d") {
    return CostSpec(Grid2DCost{j.at("side").get<std::size_t>(), j.at("hx").get<double>(),
                               j.at("hy").get<double>()},
                    scale);
  }
  throw Error(ErrorCode::kParse, "unknown cost variant '" + variant + "'");
}

json bound_to_json(const BoundSpec& bound) {
  return std::visit(Overloaded{
                        [](const DenseBound& b) {
                          return json{{"variant", "dense"}, {"values", matrix_to_json(b.values)}};
                        },
                        [](const UniformBound& b) { return json{{"variant", "uniform"}, {"value", b.value}}; },
                        [](const RankOnePlusDenseBound& b) {
                          return json{{"variant", "rank_one_plus_dense"},
                                      {"a", b.a},
                                      {"b", b.b},
                                      {"scale", b.scale},
                                      {"delta", b.delta},
                                      {"noise", b.noise ? matrix_to_json(*b.noise) : json(nullptr)}};
                        },
                    },
                    bound.form());
}

BoundSpec bound_from_json(const json& j) {
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "uniform") return BoundSpec::uniform(j.at("value").get<double>());
  if (variant == "dense") return BoundSpec::dense(matrix_from_json(j.at("values")));
  if (variant == "rank_one_plus_dense") {
    std::optional<Matrix> noise;
    if (j.contains("noise") && !j.at("noise").is_null()) noise = matrix_from_json(j.at("noise"));
    return BoundSpec::rank_one(j.at("a").get<std::vector<double>>(), j.at("b").get<std::vector<double>>(),
                               j.at("scale").get<double>(), j.value("delta", 0.0), std::move(noise));
  }
  throw Error(ErrorCode::kParse, "unknown bound variant '" + variant + "'");
}

}  // namespace

std::string instance_to_json(const ProblemInstance& instance, int indent) {
  json doc{
      {"n", instance.n()},
      {"m", instance.m()},
      {"cost", cost_to_json(instance.cost())},
      {"u", instance.marginals().u},
      {"v", instance.marginals().v},
      {"lower", bound_to_json(instance.bounds().lower)},
      {"upper", bound_to_json(instance.bounds().upper)},
  };
  return doc.dump(indent);
}

ProblemInstance instance_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("invalid JSON: ") + e.what());
  }
  try {
    Marginals marginals{doc.at("u").get<std::vector<double>>(), doc.at("v").get<std::vector<double>>()};
    if (marginals.u.size() != doc.at("n").get<std::size_t>() ||
        marginals.v.size() != doc.at("m").get<std::size_t>()) {
      throw Error(ErrorCode::kDimensionMismatch, "n/m do not match marginal lengths");
    }
    return ProblemInstance(cost_from_json(doc.at("cost")), std::move(marginals),
                           CapacityBounds{bound_from_json(doc.at("lower")), bound_from_json(doc.at("upper"))});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed instance: ") + e.what());
  }
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return instance_from_json(buffer.str());
}

void save_instance(const ProblemInstance& instance, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kParse, "cannot write " + path.string());
  out << instance_to_json(instance, 1) << '\n';
}

}  // namespace cot
