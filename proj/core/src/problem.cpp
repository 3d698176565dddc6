#include "cot/problem.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "cot/error.hpp"

namespace cot {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kDegenerate: return "numerically degenerate";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kNewtonFailure: return "newton failure";
    case ErrorCode::kKernelUnderflow: return "kernel underflow";
    case ErrorCode::kSizeCap: return "size cap exceeded";
    case ErrorCode::kTimeBudget: return "time budget exceeded";
    case ErrorCode::kParse: return "parse error";
  }
  return "unknown";
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix out(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != out.cols()) {
      throw Error(ErrorCode::kDimensionMismatch, "ragged matrix rows", i);
    }
    std::copy(rows[i].begin(), rows[i].end(), out.row(i).begin());
  }
  return out;
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double squared(double x) { return x * x; }

}  // namespace

// ---------------------------------------------------------------------------
// CostSpec

CostSpec::CostSpec(Form form, double scale) : form_(std::move(form)), scale_(scale) {
  if (!(scale_ >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "cost scale must be >= 0");
  std::visit(Overloaded{
                 [](const DenseCost& c) {
                   for (double x : c.values.values()) {
                     if (!(x >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "costs must be >= 0");
                   }
                 },
                 [](const Grid1DCost& c) {
                   if (!(c.h > 0.0)) throw Error(ErrorCode::kInvalidArgument, "grid spacing must be > 0");
                 },
                 [](const Grid2DCost& c) {
                   if (!(c.hx > 0.0 && c.hy > 0.0) || c.side == 0) {
                     throw Error(ErrorCode::kInvalidArgument, "invalid 2D grid");
                   }
                 },
             },
             form_);
}

double CostSpec::raw(std::size_t i, std::size_t j) const {
  return std::visit(Overloaded{
                        [&](const DenseCost& c) { return c.values(i, j); },
                        [&](const Grid1DCost& c) {
                          const double d = static_cast<double>(i) - static_cast<double>(j);
                          return squared(c.h * d);
                        },
                        [&](const Grid2DCost& c) {
                          const double d1 = static_cast<double>(i / c.side) - static_cast<double>(j / c.side);
                          const double d2 = static_cast<double>(i % c.side) - static_cast<double>(j % c.side);
                          return squared(c.hx * d1) + squared(c.hy * d2);
                        },
                    },
                    form_);
}

double CostSpec::operator()(std::size_t i, std::size_t j) const {
  return scale_ == 1.0 ? raw(i, j) : scale_ * raw(i, j);
}

void CostSpec::fill_row(std::size_t i, std::span<double> out) const {
  if (const auto* dense = std::get_if<DenseCost>(&form_)) {
    const auto row = dense->values.row(i);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = scale_ == 1.0 ? row[j] : scale_ * row[j];
    return;
  }
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = (*this)(i, j);
}

void CostSpec::fill_col(std::size_t j, std::span<double> out) const {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)(i, j);
}

bool CostSpec::fits(std::size_t n, std::size_t m) const {
  return std::visit(Overloaded{
                        [&](const DenseCost& c) { return c.values.rows() == n && c.values.cols() == m; },
                        [](const Grid1DCost&) { return true; },
                        [&](const Grid2DCost& c) { return n == c.side * c.side && m == c.side * c.side; },
                    },
                    form_);
}

CostSpec CostSpec::scaled(double factor) const { return CostSpec(form_, scale_ * factor); }

// ---------------------------------------------------------------------------
// BoundSpec

double BoundSpec::operator()(std::size_t i, std::size_t j) const {
  return std::visit(Overloaded{
                        [&](const DenseBound& b) { return b.values(i, j); },
                        [](const UniformBound& b) { return b.value; },
                        [&](const RankOnePlusDenseBound& b) {
                          double x = b.scale * b.a[i] * b.b[j];
                          if (b.noise && b.delta != 0.0) x += b.delta * (*b.noise)(i, j);
                          return x;
                        },
                    },
                    form_);
}

void BoundSpec::fill_row(std::size_t i, std::span<double> out) const {
  std::visit(Overloaded{
                 [&](const DenseBound& b) {
                   const auto row = b.values.row(i);
                   std::copy(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(out.size()), out.begin());
                 },
                 [&](const UniformBound& b) { std::fill(out.begin(), out.end(), b.value); },
                 [&](const RankOnePlusDenseBound& b) {
                   const double ai = b.scale * b.a[i];
                   const bool noisy = b.noise && b.delta != 0.0;
                   for (std::size_t j = 0; j < out.size(); ++j) {
                     out[j] = ai * b.b[j];
                     if (noisy) out[j] += b.delta * (*b.noise)(i, j);
                   }
                 },
             },
             form_);
}

void BoundSpec::fill_col(std::size_t j, std::span<double> out) const {
  std::visit(Overloaded{
                 [&](const DenseBound& b) {
                   for (std::size_t i = 0; i < out.size(); ++i) out[i] = b.values(i, j);
                 },
                 [&](const UniformBound& b) { std::fill(out.begin(), out.end(), b.value); },
                 [&](const RankOnePlusDenseBound& b) {
                   const double bj = b.scale * b.b[j];
                   const bool noisy = b.noise && b.delta != 0.0;
                   for (std::size_t i = 0; i < out.size(); ++i) {
                     out[i] = b.a[i] * bj;
                     if (noisy) out[i] += b.delta * (*b.noise)(i, j);
                   }
                 },
             },
             form_);
}

double BoundSpec::row_sum(std::size_t i, std::size_t m) const {
  if (const auto* u = std::get_if<UniformBound>(&form_)) return u->value * static_cast<double>(m);
  double s = 0.0;
  for (std::size_t j = 0; j < m; ++j) s += (*this)(i, j);
  return s;
}

double BoundSpec::col_sum(std::size_t j, std::size_t n) const {
  if (const auto* u = std::get_if<UniformBound>(&form_)) return u->value * static_cast<double>(n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += (*this)(i, j);
  return s;
}

double BoundSpec::total(std::size_t n, std::size_t m) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += row_sum(i, m);
  return s;
}

bool BoundSpec::fits(std::size_t n, std::size_t m) const {
  return std::visit(Overloaded{
                        [&](const DenseBound& b) { return b.values.rows() == n && b.values.cols() == m; },
                        [](const UniformBound&) { return true; },
                        [&](const RankOnePlusDenseBound& b) {
                          if (b.a.size() != n || b.b.size() != m) return false;
                          return !b.noise || (b.noise->rows() == n && b.noise->cols() == m);
                        },
                    },
                    form_);
}

bool BoundSpec::is_zero(std::size_t n, std::size_t m) const {
  if (const auto* u = std::get_if<UniformBound>(&form_)) return u->value == 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if ((*this)(i, j) != 0.0) return false;
    }
  }
  return true;
}

BoundSpec BoundSpec::scaled(double factor) const {
  return std::visit(Overloaded{
                        [&](const DenseBound& b) {
                          Matrix out = b.values;
                          for (double& x : out.values()) x *= factor;
                          return BoundSpec::dense(std::move(out));
                        },
                        [&](const UniformBound& b) { return BoundSpec::uniform(b.value * factor); },
                        [&](const RankOnePlusDenseBound& b) {
                          return BoundSpec::rank_one(b.a, b.b, b.scale * factor, b.delta * factor, b.noise);
                        },
                    },
                    form_);
}

Matrix BoundSpec::materialize(std::size_t n, std::size_t m) const {
  Matrix out(n, m);
  for (std::size_t i = 0; i < n; ++i) fill_row(i, out.row(i));
  return out;
}

// ---------------------------------------------------------------------------
// ProblemInstance

ProblemInstance::ProblemInstance(CostSpec cost, Marginals marginals, CapacityBounds bounds)
    : cost_(std::move(cost)), marginals_(std::move(marginals)), bounds_(std::move(bounds)) {
  const std::size_t rows = n();
  const std::size_t cols = m();
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "instance needs at least one row and one column");
  }
  if (!cost_.fits(rows, cols)) {
    throw Error(ErrorCode::kDimensionMismatch, "cost shape does not match marginals");
  }
  if (!bounds_.lower.fits(rows, cols)) {
    throw Error(ErrorCode::kDimensionMismatch, "lower bound shape does not match marginals");
  }
  if (!bounds_.upper.fits(rows, cols)) {
    throw Error(ErrorCode::kDimensionMismatch, "upper bound shape does not match marginals");
  }
}

}  // namespace cot
