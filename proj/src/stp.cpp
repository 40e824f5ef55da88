#include "stplogic/stp.hpp"

#include <numeric>

namespace stplogic {

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows())
    throw ShapeError("multiply: " + std::to_string(a.cols()) + " cols vs " +
                     std::to_string(b.rows()) + " rows");
  DenseMatrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t t = 0; t < a.cols(); ++t) {
      const double aij = a(i, t);
      if (aij == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aij * b(t, j);
    }
  return r;
}

std::vector<double> mat_vec(const DenseMatrix& a, const std::vector<double>& x) {
  if (a.cols() != x.size()) throw ShapeError("apply: dimension mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b, std::size_t dim_cap) {
  const std::size_t rows = detail::checked_mul(a.rows(), b.rows());
  const std::size_t cols = detail::checked_mul(a.cols(), b.cols());
  detail::check_cap(rows, cols, dim_cap);
  DenseMatrix r(rows, cols);
  for (std::size_t ia = 0; ia < a.rows(); ++ia)
    for (std::size_t ja = 0; ja < a.cols(); ++ja) {
      const double v = a(ia, ja);
      if (v == 0.0) continue;
      for (std::size_t ib = 0; ib < b.rows(); ++ib)
        for (std::size_t jb = 0; jb < b.cols(); ++jb)
          r(ia * b.rows() + ib, ja * b.cols() + jb) = v * b(ib, jb);
    }
  return r;
}

std::vector<double> kron_vec(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> r(detail::checked_mul(a.size(), b.size()));
  std::size_t idx = 0;
  for (double va : a)
    for (double vb : b) r[idx++] = va * vb;
  return r;
}

namespace {

// A (x) I_t without forming the identity.
DenseMatrix kron_with_identity(const DenseMatrix& a, std::size_t t, std::size_t dim_cap) {
  if (t == 1) return a;
  const std::size_t rows = detail::checked_mul(a.rows(), t);
  const std::size_t cols = detail::checked_mul(a.cols(), t);
  detail::check_cap(rows, cols, dim_cap);
  DenseMatrix r(rows, cols);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double v = a(i, j);
      if (v == 0.0) continue;
      for (std::size_t u = 0; u < t; ++u) r(i * t + u, j * t + u) = v;
    }
  return r;
}

std::size_t stp_lcm(std::size_t n, std::size_t p, std::size_t dim_cap) {
  const std::size_t g = std::gcd(n, p);
  const std::size_t l = detail::checked_mul(n / g, p);
  // Expanded factors carry l columns, so l itself is held to the cap.
  if (l > dim_cap) throw DimensionCapError(l, dim_cap);
  return l;
}

}  // namespace

DenseMatrix stp(const DenseMatrix& a, const DenseMatrix& b, std::size_t dim_cap) {
  if (a.cols() == b.rows()) return multiply(a, b);
  const std::size_t l = stp_lcm(a.cols(), b.rows(), dim_cap);
  const std::size_t alpha = l / a.cols();
  const std::size_t beta = l / b.rows();
  detail::check_cap(detail::checked_mul(a.rows(), alpha), detail::checked_mul(b.cols(), beta),
                    dim_cap);
  return multiply(kron_with_identity(a, alpha, dim_cap), kron_with_identity(b, beta, dim_cap));
}

LogicalMatrix swap_matrix(std::size_t m, std::size_t n, std::size_t dim_cap) {
  if (m == 0 || n == 0) throw ShapeError("swap matrix needs positive dimensions");
  const std::size_t mn = detail::checked_mul(m, n);
  detail::check_cap(mn, mn, dim_cap);
  std::vector<std::uint32_t> idx(mn);
  for (std::size_t i = 1; i <= m; ++i)
    for (std::size_t j = 1; j <= n; ++j)
      idx[(i - 1) * n + j - 1] = static_cast<std::uint32_t>(i + (j - 1) * m);
  return LogicalMatrix(mn, std::move(idx));
}

LogicalMatrix power_reduce_matrix(std::size_t k, std::size_t dim_cap) {
  if (k == 0) throw ShapeError("power-reduce matrix needs k >= 1");
  const std::size_t k2 = detail::checked_mul(k, k);
  detail::check_cap(k2, k, dim_cap);
  std::vector<std::uint32_t> idx(k);
  for (std::size_t i = 1; i <= k; ++i) idx[i - 1] = static_cast<std::uint32_t>((i - 1) * k + i);
  return LogicalMatrix(k2, std::move(idx));
}

LogicalMatrix projection_matrix(const std::vector<std::size_t>& alphabets,
                                const std::vector<std::size_t>& subset, std::size_t dim_cap) {
  const std::size_t n = alphabets.size();
  for (std::size_t ki : alphabets)
    if (ki == 0) throw ShapeError("alphabet sizes must be positive");
  for (std::size_t u = 0; u < subset.size(); ++u) {
    if (subset[u] < 1 || subset[u] > n)
      throw std::domain_error("projection subset contains node " + std::to_string(subset[u]) +
                              " outside [1, " + std::to_string(n) + "]");
    if (u > 0 && subset[u] <= subset[u - 1])
      throw std::domain_error("projection subset must be strictly ascending");
  }

  std::size_t k = 1;
  for (std::size_t ki : alphabets) k = detail::checked_mul(k, ki);
  std::size_t sub_k = 1;
  for (std::size_t id : subset) sub_k = detail::checked_mul(sub_k, alphabets[id - 1]);
  detail::check_cap(sub_k, k, dim_cap);

  // Mixed-radix strides over the selected nodes (node 1 most significant).
  std::vector<std::size_t> stride(subset.size(), 1);
  for (std::size_t u = subset.size(); u-- > 1;)
    stride[u - 1] = stride[u] * alphabets[subset[u] - 1];

  std::vector<std::uint32_t> idx(k);
  std::vector<std::size_t> digits(n, 1);  // odometer over global states
  for (std::size_t g = 0; g < k; ++g) {
    std::size_t target = 1;
    for (std::size_t u = 0; u < subset.size(); ++u)
      target += (digits[subset[u] - 1] - 1) * stride[u];
    idx[g] = static_cast<std::uint32_t>(target);
    for (std::size_t d = n; d-- > 0;) {
      if (++digits[d] <= alphabets[d]) break;
      digits[d] = 1;
    }
  }
  return LogicalMatrix(sub_k, std::move(idx));
}

DenseMatrix khatri_rao(const DenseMatrix& a, const DenseMatrix& b, std::size_t dim_cap) {
  if (a.cols() != b.cols())
    throw ShapeError("khatri_rao: column counts differ (" + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.cols()) + ")");
  const std::size_t rows = detail::checked_mul(a.rows(), b.rows());
  detail::check_cap(rows, a.cols(), dim_cap);
  DenseMatrix r(rows, a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t ia = 0; ia < a.rows(); ++ia) {
      const double v = a(ia, j);
      if (v == 0.0) continue;
      for (std::size_t ib = 0; ib < b.rows(); ++ib) r(ia * b.rows() + ib, j) = v * b(ib, j);
    }
  return r;
}

LogicalMatrix kron_identity_logical(const LogicalMatrix& a, std::size_t t, std::size_t dim_cap) {
  if (t == 0) throw ShapeError("identity factor must be positive");
  if (t == 1) return a;
  const std::size_t rows = detail::checked_mul(a.rows(), t);
  const std::size_t cols = detail::checked_mul(a.cols(), t);
  detail::check_cap(rows, cols, dim_cap);
  std::vector<std::uint32_t> idx(cols);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const std::size_t base = static_cast<std::size_t>(a.col_index(j) - 1) * t;
    for (std::size_t u = 0; u < t; ++u) idx[j * t + u] = static_cast<std::uint32_t>(base + u + 1);
  }
  return LogicalMatrix(rows, std::move(idx));
}

LogicalMatrix kron_logical(const LogicalMatrix& a, const LogicalMatrix& b, std::size_t dim_cap) {
  const std::size_t rows = detail::checked_mul(a.rows(), b.rows());
  const std::size_t cols = detail::checked_mul(a.cols(), b.cols());
  detail::check_cap(rows, cols, dim_cap);
  std::vector<std::uint32_t> idx(cols);
  for (std::size_t ja = 0; ja < a.cols(); ++ja) {
    const std::size_t base = static_cast<std::size_t>(a.col_index(ja) - 1) * b.rows();
    for (std::size_t jb = 0; jb < b.cols(); ++jb)
      idx[ja * b.cols() + jb] = static_cast<std::uint32_t>(base + b.col_index(jb));
  }
  return LogicalMatrix(rows, std::move(idx));
}

LogicalMatrix multiply_logical(const LogicalMatrix& a, const LogicalMatrix& b) {
  if (a.cols() != b.rows())
    throw ShapeError("multiply_logical: " + std::to_string(a.cols()) + " cols vs " +
                     std::to_string(b.rows()) + " rows");
  std::vector<std::uint32_t> idx(b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) idx[j] = a.col_index(b.col_index(j) - 1);
  return LogicalMatrix(a.rows(), std::move(idx));
}

LogicalMatrix stp_logical(const LogicalMatrix& a, const LogicalMatrix& b, std::size_t dim_cap) {
  if (a.cols() == b.rows()) return multiply_logical(a, b);
  const std::size_t l = stp_lcm(a.cols(), b.rows(), dim_cap);
  const std::size_t alpha = l / a.cols();
  const std::size_t beta = l / b.rows();
  detail::check_cap(detail::checked_mul(a.rows(), alpha), detail::checked_mul(b.cols(), beta),
                    dim_cap);
  return multiply_logical(kron_identity_logical(a, alpha, dim_cap),
                          kron_identity_logical(b, beta, dim_cap));
}

LogicalMatrix khatri_rao_logical(const LogicalMatrix& a, const LogicalMatrix& b,
                                 std::size_t dim_cap) {
  if (a.cols() != b.cols()) throw ShapeError("khatri_rao_logical: column counts differ");
  const std::size_t rows = detail::checked_mul(a.rows(), b.rows());
  detail::check_cap(rows, a.cols(), dim_cap);
  std::vector<std::uint32_t> idx(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j)
    idx[j] = static_cast<std::uint32_t>(static_cast<std::size_t>(a.col_index(j) - 1) * b.rows() +
                                        b.col_index(j));
  return LogicalMatrix(rows, std::move(idx));
}

DenseMatrix dense_times_logical(const DenseMatrix& a, const LogicalMatrix& l) {
  if (a.cols() != l.rows())
    throw ShapeError("dense_times_logical: " + std::to_string(a.cols()) + " cols vs " +
                     std::to_string(l.rows()) + " rows");
  DenseMatrix r(a.rows(), l.cols());
  for (std::size_t j = 0; j < l.cols(); ++j) {
    const std::size_t src = l.col_index(j) - 1;
    for (std::size_t i = 0; i < a.rows(); ++i) r(i, j) = a(i, src);
  }
  return r;
}

DenseMatrix logical_times_dense(const LogicalMatrix& l, const DenseMatrix& a) {
  if (l.cols() != a.rows())
    throw ShapeError("logical_times_dense: " + std::to_string(l.cols()) + " cols vs " +
                     std::to_string(a.rows()) + " rows");
  DenseMatrix r(l.rows(), a.cols());
  for (std::size_t g = 0; g < a.rows(); ++g) {
    const std::size_t dst = l.col_index(g) - 1;
    for (std::size_t j = 0; j < a.cols(); ++j) r(dst, j) += a(g, j);
  }
  return r;
}

std::vector<double> logical_apply(const LogicalMatrix& l, const std::vector<double>& x) {
  if (l.cols() != x.size()) throw ShapeError("logical_apply: dimension mismatch");
  std::vector<double> y(l.rows(), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) y[l.col_index(j) - 1] += x[j];
  return y;
}

}  // namespace stplogic
