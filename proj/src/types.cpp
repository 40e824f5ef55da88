#include "stplogic/types.hpp"

#include <cmath>
#include <cstdio>

namespace stplogic {

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ShapeError("matrix needs at least one row");
  const std::size_t cols = rows.front().size();
  if (cols == 0) throw ShapeError("matrix needs at least one column");
  DenseMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw ShapeError("ragged rows");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool DenseMatrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

double DenseMatrix::max_abs_diff(const DenseMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw ShapeError("shape mismatch: " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                     " vs " + std::to_string(other.rows_) + "x" + std::to_string(other.cols_));
  double d = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i)
    d = std::max(d, std::abs(data_[i] - other.data_[i]));
  return d;
}

namespace {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

StochasticVerdict validate_stochastic(const DenseMatrix& m, double eps) {
  StochasticVerdict v;
  if (!m.all_finite()) {
    v.ok = false;
    v.message = "matrix has non-finite entries";
    return v;
  }
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const double e = m(i, j);
      if (e < -eps) {
        v.ok = false;
        v.column = j + 1;
        v.column_sum = e;
        v.message = "column " + std::to_string(j + 1) + " has negative entry " + format_real(e);
        return v;
      }
      sum += e;
    }
    if (std::abs(sum - 1.0) > eps) {
      v.ok = false;
      v.column = j + 1;
      v.column_sum = sum;
      v.message = "column " + std::to_string(j + 1) + " sums to " + format_real(sum);
      return v;
    }
  }
  return v;
}

StochasticMatrix::StochasticMatrix(DenseMatrix m, double eps, bool strict)
    : m_(std::move(m)), eps_(eps) {
  // Rounding noise from input files is tolerated: tiny negatives clamp to 0.
  for (double& e : m_.data())
    if (e < 0.0 && e > -eps_) e = 0.0;
  verdict_ = validate_stochastic(m_, eps_);
  if (strict && !verdict_.ok) throw ValidationError("not column-stochastic: " + verdict_.message);
}

ProbabilityVector::ProbabilityVector(std::vector<double> entries, double eps) : v_(std::move(entries)) {
  if (v_.empty()) throw ShapeError("probability vector needs at least one entry");
  double sum = 0.0;
  for (double& e : v_) {
    if (!std::isfinite(e)) throw ValidationError("probability vector has non-finite entry");
    if (e < -eps) throw ValidationError("probability vector entry " + std::to_string(e) + " is negative");
    if (e < 0.0) e = 0.0;
    sum += e;
  }
  if (std::abs(sum - 1.0) > eps)
    throw ValidationError("probability vector sums to " + format_real(sum) + ", not 1");
}

ProbabilityVector ProbabilityVector::point_mass(std::size_t dim, std::size_t index_1based) {
  if (dim == 0 || index_1based < 1 || index_1based > dim)
    throw ShapeError("point mass index outside [1, dim]");
  std::vector<double> v(dim, 0.0);
  v[index_1based - 1] = 1.0;
  return raw(std::move(v));
}

double ProbabilityVector::sum() const {
  double s = 0.0;
  for (double e : v_) s += e;
  return s;
}

double ProbabilityVector::linf_distance(const ProbabilityVector& other) const {
  if (dim() != other.dim()) throw ShapeError("dimension mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < v_.size(); ++i) d = std::max(d, std::abs(v_[i] - other.v_[i]));
  return d;
}

double ProbabilityVector::l1_distance(const ProbabilityVector& other) const {
  if (dim() != other.dim()) throw ShapeError("dimension mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < v_.size(); ++i) d += std::abs(v_[i] - other.v_[i]);
  return d;
}

}  // namespace stplogic
