#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stplogic {

/// Hard ceiling on rows/columns an operation may produce (state spaces grow
/// as prod k_i, so fail fast instead of exhausting memory). Configurable per
/// call on every operation that can grow a dimension.
inline constexpr std::size_t kDefaultDimCap = std::size_t{1} << 20;

/// Tolerance for column-stochastic / simplex membership checks.
inline constexpr double kStochasticEps = 1e-9;

/// Absolute tolerance used by algebra-identity tests.
inline constexpr double kAlgebraTol = 1e-12;

class DimensionCapError : public std::runtime_error {
 public:
  DimensionCapError(std::size_t attempted, std::size_t cap)
      : std::runtime_error("dimension cap exceeded: result would have " +
                           std::to_string(attempted) +
                           " rows or columns (cap " + std::to_string(cap) + ")"),
        attempted_(attempted),
        cap_(cap) {}

  std::size_t attempted() const { return attempted_; }
  std::size_t cap() const { return cap_; }

 private:
  std::size_t attempted_;
  std::size_t cap_;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Multiplies with overflow detection; overflow is reported as a cap error
// since any overflowing dimension exceeds every admissible cap.
inline std::size_t checked_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > SIZE_MAX / a) throw DimensionCapError(SIZE_MAX, kDefaultDimCap);
  return a * b;
}

inline void check_cap(std::size_t rows, std::size_t cols, std::size_t cap) {
  if (rows > cap) throw DimensionCapError(rows, cap);
  if (cols > cap) throw DimensionCapError(cols, cap);
}

}  // namespace detail

/// Dense real matrix, row-major. A plain value type; the algebra lives in
/// stp.hpp. Element access is 0-based.
class DenseMatrix {
 public:
  DenseMatrix() : rows_(0), cols_(0) {}

  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(detail::checked_mul(rows, cols), 0.0) {
    if (rows == 0 || cols == 0) throw ShapeError("matrix dimensions must be positive");
  }

  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (rows == 0 || cols == 0) throw ShapeError("matrix dimensions must be positive");
    if (data_.size() != detail::checked_mul(rows, cols))
      throw ShapeError("entry count does not match rows*cols");
  }

  /// Builds from a list of rows (each inner vector one row).
  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  std::vector<double> column(std::size_t j) const {
    std::vector<double> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = data_[i * cols_ + j];
    return c;
  }

  bool all_finite() const;

  /// Max absolute entrywise difference; throws ShapeError on shape mismatch.
  double max_abs_diff(const DenseMatrix& other) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// Column-unit-vector matrix stored as an index array: column j carries a
/// single 1 in row col_index(j). Indices are 1-based, matching the
/// delta_s[i1,...,ir] notation; column positions are 0-based like every
/// other container here.
class LogicalMatrix {
 public:
  LogicalMatrix(std::size_t rows, std::vector<std::uint32_t> col_indices)
      : rows_(rows), cols_(std::move(col_indices)) {
    if (rows == 0) throw ShapeError("logical matrix needs at least one row");
    if (cols_.empty()) throw ShapeError("logical matrix needs at least one column");
    for (std::uint32_t v : cols_)
      if (v < 1 || v > rows_)
        throw ValidationError("logical column index " + std::to_string(v) +
                              " outside [1, " + std::to_string(rows_) + "]");
  }

  static LogicalMatrix identity(std::size_t n) {
    std::vector<std::uint32_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i + 1);
    return LogicalMatrix(n, std::move(idx));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_.size(); }

  /// 1-based row index of the unit entry in column j (j 0-based).
  std::uint32_t col_index(std::size_t j) const { return cols_[j]; }

  const std::vector<std::uint32_t>& col_indices() const { return cols_; }

  DenseMatrix dense() const {
    DenseMatrix d(rows_, cols_.size());
    for (std::size_t j = 0; j < cols_.size(); ++j) d(cols_[j] - 1, j) = 1.0;
    return d;
  }

  bool operator==(const LogicalMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

 private:
  std::size_t rows_;
  std::vector<std::uint32_t> cols_;
};

/// Outcome of a column-stochastic validation pass.
struct StochasticVerdict {
  bool ok = true;
  std::size_t column = 0;  // 1-based offending column when !ok
  double column_sum = 0.0;
  std::string message;
};

/// Accepts iff all entries >= -eps and every column sums to 1 within eps.
StochasticVerdict validate_stochastic(const DenseMatrix& m, double eps = kStochasticEps);

/// Dense column-stochastic matrix. Construction clamps entries in (-eps, 0)
/// to zero and rejects anything worse unless strict=false, in which case the
/// violation is recorded and carried along (needed to admit deliberately
/// substochastic inputs; every downstream verdict then flags it).
class StochasticMatrix {
 public:
  explicit StochasticMatrix(DenseMatrix m, double eps = kStochasticEps, bool strict = true);

  const DenseMatrix& dense() const { return m_; }
  std::size_t rows() const { return m_.rows(); }
  std::size_t cols() const { return m_.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  double eps() const { return eps_; }

  /// False when constructed with strict=false from a matrix violating
  /// column-stochasticity; the verdict carries the offending column.
  bool is_valid() const { return verdict_.ok; }
  const StochasticVerdict& verdict() const { return verdict_; }

 private:
  DenseMatrix m_;
  double eps_;
  StochasticVerdict verdict_;
};

/// Point on the probability simplex. Entries in (-eps, 0) are clamped on
/// construction; raw() skips validation for values produced internally
/// (e.g. applications of admitted substochastic operators).
class ProbabilityVector {
 public:
  explicit ProbabilityVector(std::vector<double> entries, double eps = kStochasticEps);

  static ProbabilityVector raw(std::vector<double> entries) {
    ProbabilityVector p;
    p.v_ = std::move(entries);
    return p;
  }

  static ProbabilityVector point_mass(std::size_t dim, std::size_t index_1based);

  std::size_t dim() const { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  const std::vector<double>& values() const { return v_; }

  double sum() const;
  /// Max-norm distance to another vector of the same dimension.
  double linf_distance(const ProbabilityVector& other) const;
  /// L1 distance to another vector of the same dimension.
  double l1_distance(const ProbabilityVector& other) const;

 private:
  ProbabilityVector() = default;
  std::vector<double> v_;
};

}  // namespace stplogic
