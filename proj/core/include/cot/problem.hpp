#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "cot/matrix.hpp"

namespace cot {

// Source masses u (length N) and sink masses v (length M).
struct Marginals {
  std::vector<double> u;
  std::vector<double> v;
};

// Cost forms. Grid costs are evaluated on demand and never materialized.
struct DenseCost {
  Matrix values;
};
// C_ij = h^2 (i - j)^2
struct Grid1DCost {
  double h = 1.0;
};
// Square grid with `side` points per axis; cell (i1, i2) is flattened to
// i1 * side + i2. C = hx^2 (i1 - j1)^2 + hy^2 (i2 - j2)^2.
struct Grid2DCost {
  std::size_t side = 1;
  double hx = 1.0;
  double hy = 1.0;
};

class CostSpec {
 public:
  using Form = std::variant<DenseCost, Grid1DCost, Grid2DCost>;

  CostSpec() : form_(Grid1DCost{}) {}
  explicit CostSpec(Form form, double scale = 1.0);

  static CostSpec dense(Matrix values) { return CostSpec(DenseCost{std::move(values)}); }
  static CostSpec grid_1d(double h) { return CostSpec(Grid1DCost{h}); }
  static CostSpec grid_2d(std::size_t side, double hx, double hy) {
    return CostSpec(Grid2DCost{side, hx, hy});
  }

  double operator()(std::size_t i, std::size_t j) const;
  void fill_row(std::size_t i, std::span<double> out) const;
  void fill_col(std::size_t j, std::span<double> out) const;

  // Whether the form can describe an n x m cost.
  bool fits(std::size_t n, std::size_t m) const;

  // Multiplies every entry by `factor`.
  CostSpec scaled(double factor) const;

  const Form& form() const noexcept { return form_; }
  double scale() const noexcept { return scale_; }

 private:
  double raw(std::size_t i, std::size_t j) const;

  Form form_;
  double scale_ = 1.0;
};

// Bound forms used for the lower (theta) and upper (eta) capacity matrices.
struct DenseBound {
  Matrix values;
};
struct UniformBound {
  double value = 0.0;
};
// scale * a b^T + delta * noise, with noise optional (treated as zero).
struct RankOnePlusDenseBound {
  std::vector<double> a;
  std::vector<double> b;
  double scale = 1.0;
  double delta = 0.0;
  std::optional<Matrix> noise;
};

class BoundSpec {
 public:
  using Form = std::variant<DenseBound, UniformBound, RankOnePlusDenseBound>;

  BoundSpec() : form_(UniformBound{0.0}) {}
  explicit BoundSpec(Form form) : form_(std::move(form)) {}

  static BoundSpec zero() { return BoundSpec(UniformBound{0.0}); }
  static BoundSpec uniform(double c) { return BoundSpec(UniformBound{c}); }
  static BoundSpec dense(Matrix values) { return BoundSpec(DenseBound{std::move(values)}); }
  static BoundSpec rank_one(std::vector<double> a, std::vector<double> b, double scale,
                            double delta = 0.0, std::optional<Matrix> noise = std::nullopt) {
    return BoundSpec(RankOnePlusDenseBound{std::move(a), std::move(b), scale, delta, std::move(noise)});
  }

  double operator()(std::size_t i, std::size_t j) const;
  void fill_row(std::size_t i, std::span<double> out) const;
  void fill_col(std::size_t j, std::span<double> out) const;

  // Sums over an n x m support.
  double row_sum(std::size_t i, std::size_t m) const;
  double col_sum(std::size_t j, std::size_t n) const;
  double total(std::size_t n, std::size_t m) const;

  bool fits(std::size_t n, std::size_t m) const;
  bool is_zero(std::size_t n, std::size_t m) const;

  BoundSpec scaled(double factor) const;
  Matrix materialize(std::size_t n, std::size_t m) const;

  const Form& form() const noexcept { return form_; }

 private:
  Form form_;
};

struct CapacityBounds {
  BoundSpec lower;  // theta
  BoundSpec upper;  // eta

  double theta(std::size_t i, std::size_t j) const { return lower(i, j); }
  double eta(std::size_t i, std::size_t j) const { return upper(i, j); }
};

// min <C, gamma>  s.t.  theta <= gamma <= eta,  gamma 1 = u,  gamma^T 1 = v.
// Shapes are checked on construction; the instance is immutable afterwards.
class ProblemInstance {
 public:
  ProblemInstance(CostSpec cost, Marginals marginals, CapacityBounds bounds);

  std::size_t n() const noexcept { return marginals_.u.size(); }
  std::size_t m() const noexcept { return marginals_.v.size(); }
  const CostSpec& cost() const noexcept { return cost_; }
  const Marginals& marginals() const noexcept { return marginals_; }
  const CapacityBounds& bounds() const noexcept { return bounds_; }

  bool has_lower_bounds() const { return !bounds_.lower.is_zero(n(), m()); }

 private:
  CostSpec cost_;
  Marginals marginals_;
  CapacityBounds bounds_;
};

struct TransportPlan {
  Matrix gamma;
};

}  // namespace cot
