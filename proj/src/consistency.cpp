#include "stplogic/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "stplogic/detail/rng.hpp"
#include "stplogic/network.hpp"
#include "stplogic/stp.hpp"

namespace stplogic {

namespace {

double linf(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// out := column idx[0] of lifted[0] ⊗ column idx[1] of lifted[1] ⊗ ...
// Left-to-right, so it matches the fold that builds the reduced matrix.
void kron_columns(const std::vector<DenseMatrix>& lifted, const std::vector<std::uint32_t>& idx,
                  std::vector<double>& out, std::vector<double>& scratch) {
  out.assign(1, 1.0);
  for (std::size_t i = 0; i < lifted.size(); ++i) {
    const auto& m = lifted[i];
    const std::size_t rows = m.rows();
    const std::size_t col = idx[i] - 1;
    scratch.resize(out.size() * rows);
    for (std::size_t x = 0; x < out.size(); ++x)
      for (std::size_t y = 0; y < rows; ++y) scratch[x * rows + y] = out[x] * m(y, col);
    out.swap(scratch);
  }
}

std::vector<double> flat_dirichlet(std::size_t k, detail::SplitMix64& rng) {
  std::vector<double> p(k);
  double s = 0.0;
  for (double& e : p) {
    e = -std::log(1.0 - rng.uniform());
    s += e;
  }
  if (s <= 0.0) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(k));
  } else {
    for (double& e : p) e /= s;
  }
  return p;
}

std::size_t midpoint_count(std::size_t k) { return k <= 32 ? k * (k - 1) / 2 : 0; }

std::size_t interior_budget(std::size_t num_samples, std::size_t k) {
  const std::size_t base = k + midpoint_count(k);
  return num_samples > base ? num_samples - base : 0;
}

std::string substochastic_note(const HOperator& h) {
  return h.non_stochastic_input()
             ? "inputs are not column-stochastic; residuals computed on the raw matrices"
             : "";
}

bool advance_multiset(std::vector<std::uint32_t>& ms, std::size_t k) {
  for (std::size_t i = ms.size(); i-- > 0;) {
    if (ms[i] < k) {
      const std::uint32_t v = ms[i] + 1;
      for (std::size_t j = i; j < ms.size(); ++j) ms[j] = v;
      return true;
    }
  }
  return false;
}

}  // namespace

HOperator::HOperator(std::vector<DenseMatrix> lifted, bool allow_substochastic, double eps,
                     std::size_t dim_cap)
    : lifted_(std::move(lifted)) {
  if (lifted_.empty()) throw ShapeError("need at least one factor matrix");
  std::size_t k = 1;
  for (const auto& m : lifted_) {
    if (m.rows() == 0) throw ShapeError("factor matrices need at least one row");
    alphabets_.push_back(m.rows());
    k = detail::checked_mul(k, m.rows());
    if (k > dim_cap) throw DimensionCapError(k, dim_cap);
  }
  k_ = k;
  for (std::size_t i = 0; i < lifted_.size(); ++i) {
    if (lifted_[i].cols() != k_)
      throw ShapeError("factor " + std::to_string(i + 1) + " has " +
                       std::to_string(lifted_[i].cols()) + " columns, joint dimension is " +
                       std::to_string(k_));
    const auto verdict = validate_stochastic(lifted_[i], eps);
    if (!verdict.ok) {
      if (!allow_substochastic)
        throw ValidationError("factor " + std::to_string(i + 1) + " " + verdict.message);
      non_stochastic_ = true;
    }
  }
  if (k_ <= kReducedCacheDim) reduced_.emplace(khatri_rao_fold(lifted_, dim_cap));
}

std::size_t HOperator::memory_footprint_doubles() const {
  std::size_t total = 0;
  for (const auto& m : lifted_) total += m.rows() * m.cols();
  if (reduced_) total += reduced_->rows() * reduced_->cols();
  return total;
}

std::vector<double> HOperator::apply_power(const std::vector<double>& p) const {
  if (p.size() != k_) throw ShapeError("distribution dimension does not match the factors");
  std::vector<double> out(1, 1.0), scratch;
  for (const auto& m : lifted_) {
    const auto step = mat_vec(m, p);
    scratch.resize(out.size() * step.size());
    for (std::size_t x = 0; x < out.size(); ++x)
      for (std::size_t y = 0; y < step.size(); ++y) scratch[x * step.size() + y] = out[x] * step[y];
    out.swap(scratch);
  }
  return out;
}

std::vector<double> HOperator::apply_reduced(const std::vector<double>& p) const {
  if (p.size() != k_) throw ShapeError("distribution dimension does not match the factors");
  if (reduced_) return mat_vec(*reduced_, p);
  std::vector<double> out(k_, 0.0), col, scratch;
  std::vector<std::uint32_t> idx(lifted_.size());
  for (std::size_t j = 0; j < k_; ++j) {
    if (p[j] == 0.0) continue;
    std::fill(idx.begin(), idx.end(), static_cast<std::uint32_t>(j + 1));
    kron_columns(lifted_, idx, col, scratch);
    for (std::size_t i = 0; i < k_; ++i) out[i] += p[j] * col[i];
  }
  return out;
}

std::vector<double> HOperator::reduced_column(std::size_t r_1based) const {
  if (r_1based < 1 || r_1based > k_)
    throw ValidationError("column " + std::to_string(r_1based) + " outside [1, " +
                          std::to_string(k_) + "]");
  if (reduced_) {
    std::vector<double> col(k_);
    for (std::size_t i = 0; i < k_; ++i) col[i] = (*reduced_)(i, r_1based - 1);
    return col;
  }
  std::vector<double> out, scratch;
  std::vector<std::uint32_t> idx(lifted_.size(), static_cast<std::uint32_t>(r_1based));
  kron_columns(lifted_, idx, out, scratch);
  return out;
}

ProbabilityVector h_apply_power(const HOperator& h, const ProbabilityVector& p) {
  return ProbabilityVector::raw(h.apply_power(p.values()));
}

ProbabilityVector h_apply_reduced(const HOperator& h, const ProbabilityVector& p) {
  return ProbabilityVector::raw(h.apply_reduced(p.values()));
}

double point_consistency(const HOperator& h, const ProbabilityVector& p) {
  return linf(h.apply_power(p.values()), h.apply_reduced(p.values()));
}

ConsistencyVerdict check_consistency_sampled(const HOperator& h, std::size_t num_samples,
                                             double tol, std::uint64_t seed) {
  ConsistencyVerdict v;
  v.method = CheckMethod::sampled;
  v.tolerance = tol;
  v.non_stochastic_input = h.non_stochastic_input();
  v.note = substochastic_note(h);

  const std::size_t k = h.k();
  double worst = -1.0;
  std::vector<double> worst_point;

  auto visit = [&](const std::vector<double>& p, double residual) {
    ++v.samples_used;
    if (residual > worst) {
      worst = residual;
      worst_point = p;
    }
  };

  // Vertices: both laws reduce to the same column product.
  std::vector<double> col, scratch;
  std::vector<std::uint32_t> idx(h.n());
  for (std::size_t r = 1; r <= k; ++r) {
    std::fill(idx.begin(), idx.end(), static_cast<std::uint32_t>(r));
    kron_columns(h.lifted(), idx, col, scratch);
    const auto reduced = h.reduced_column(r);
    std::vector<double> p(k, 0.0);
    p[r - 1] = 1.0;
    visit(p, linf(col, reduced));
  }

  if (k <= 32) {
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a + 1; b < k; ++b) {
        std::vector<double> p(k, 0.0);
        p[a] = 0.5;
        p[b] = 0.5;
        visit(p, linf(h.apply_power(p), h.apply_reduced(p)));
      }
  }

  auto rng = detail::seeded_stream(seed, 0);
  for (std::size_t s = interior_budget(num_samples, k); s > 0; --s) {
    const auto p = flat_dirichlet(k, rng);
    visit(p, linf(h.apply_power(p), h.apply_reduced(p)));
  }

  v.residual = worst;
  if (worst <= tol) {
    v.status = ConsistencyStatus::consistent_at_samples;
  } else {
    v.status = ConsistencyStatus::inconsistent;
    v.witness = ProbabilityVector::raw(std::move(worst_point));
  }
  return v;
}

ConsistencyVerdict check_consistency_exact(const HOperator& h, double tol, std::size_t term_cap) {
  const std::size_t k = h.k();
  const std::size_t n = h.n();
  std::size_t terms = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (terms > term_cap / k) throw DimensionCapError(SIZE_MAX, term_cap);
    terms *= k;
  }
  if (terms > term_cap) throw DimensionCapError(terms, term_cap);

  ConsistencyVerdict v;
  v.method = CheckMethod::exact;
  v.tolerance = tol;
  v.non_stochastic_input = h.non_stochastic_input();

  // The joint law is a homogeneous degree-n form, the reduced law times
  // (1'p)^{n-1} is another; they agree on the simplex iff the symmetrized
  // coefficients agree for every multiset of column indices.
  double worst_gap = 0.0;
  std::vector<std::uint32_t> worst_multiset;
  std::vector<std::uint32_t> ms(n, 1);
  std::vector<double> c_sum(k), d_sym(k), col, scratch;
  do {
    std::fill(c_sum.begin(), c_sum.end(), 0.0);
    std::vector<std::uint32_t> perm = ms;
    std::size_t orderings = 0;
    do {
      kron_columns(h.lifted(), perm, col, scratch);
      for (std::size_t i = 0; i < k; ++i) c_sum[i] += col[i];
      ++orderings;
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (double& e : c_sum) e /= static_cast<double>(orderings);

    std::fill(d_sym.begin(), d_sym.end(), 0.0);
    for (std::size_t i = 0; i < n;) {
      std::size_t run = i + 1;
      while (run < n && ms[run] == ms[i]) ++run;
      const double weight = static_cast<double>(run - i) / static_cast<double>(n);
      const auto column = h.reduced_column(ms[i]);
      for (std::size_t j = 0; j < k; ++j) d_sym[j] += weight * column[j];
      i = run;
    }

    const double gap = linf(c_sum, d_sym);
    ++v.samples_used;
    if (gap > worst_gap) {
      worst_gap = gap;
      worst_multiset = ms;
    }
  } while (advance_multiset(ms, k));

  if (worst_gap <= tol) {
    v.status = ConsistencyStatus::consistent;
    v.residual = worst_gap;
    v.note = v.non_stochastic_input ? substochastic_note(h) : "coefficient identity verified";
    return v;
  }

  // Coefficients differ, so the laws differ somewhere; hunt a concrete
  // distribution showing the gap, biased toward the offending support.
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < n; ++i)
    if (i == 0 || worst_multiset[i] != worst_multiset[i - 1]) support.push_back(worst_multiset[i]);

  double worst_res = -1.0;
  std::vector<double> witness;
  auto try_point = [&](const std::vector<double>& p) {
    const double r = linf(h.apply_power(p), h.apply_reduced(p));
    if (r > worst_res) {
      worst_res = r;
      witness = p;
    }
  };

  std::vector<double> p(k, 0.0);
  for (std::size_t s : support) p[s - 1] = 1.0 / static_cast<double>(support.size());
  try_point(p);
  for (std::size_t a = 0; a < support.size(); ++a)
    for (std::size_t b = a + 1; b < support.size(); ++b) {
      std::vector<double> mid(k, 0.0);
      mid[support[a] - 1] = 0.5;
      mid[support[b] - 1] = 0.5;
      try_point(mid);
    }
  auto face_rng = detail::seeded_stream(0x5eedc0deull, 0);
  for (int s = 0; s < 64; ++s) {
    const auto face = flat_dirichlet(support.size(), face_rng);
    std::vector<double> q(k, 0.0);
    for (std::size_t i = 0; i < support.size(); ++i) q[support[i] - 1] = face[i];
    try_point(q);
  }
  auto full_rng = detail::seeded_stream(0x5eedc0deull, 1);
  for (int s = 0; s < 128; ++s) try_point(flat_dirichlet(k, full_rng));

  v.status = ConsistencyStatus::inconsistent;
  v.residual = worst_res;
  v.witness = ProbabilityVector::raw(std::move(witness));
  char gap_buf[32];
  std::snprintf(gap_buf, sizeof(gap_buf), "%.6g", worst_gap);
  v.note = std::string("largest coefficient gap ") + gap_buf;
  if (v.non_stochastic_input) v.note += "; " + substochastic_note(h);
  return v;
}

ConsistencyVerdict check_corollary_matrix(const HOperator& h, std::size_t num_samples, double tol,
                                          std::uint64_t seed) {
  const std::size_t k = h.k();
  const std::size_t n = h.n();
  if (n < 2) throw ValidationError("the matrix condition needs at least two factors");
  if (detail::checked_mul(k, k) > kDefaultDimCap) throw DimensionCapError(k * k, kDefaultDimCap);

  ConsistencyVerdict v;
  v.method = CheckMethod::matrix_condition;
  v.tolerance = tol;
  v.non_stochastic_input = h.non_stochastic_input();

  const auto& last = h.lifted().back();
  const std::size_t kn = last.rows();
  const std::size_t lead = k / kn;
  std::vector<std::vector<double>> ref(k);
  for (std::size_t r = 0; r < k; ++r) ref[r] = h.reduced_column(r + 1);

  double worst = -1.0;
  std::vector<double> worst_point;

  // Gap at p: contract all but the last factor with p, pair the result with
  // the last factor's columns, and compare against the reduced matrix.
  auto visit = [&](const std::vector<double>& p) {
    std::vector<double> w(1, 1.0), scratch;
    for (std::size_t i = 0; i + 1 < h.n(); ++i) {
      const auto step = mat_vec(h.lifted()[i], p);
      scratch.resize(w.size() * step.size());
      for (std::size_t x = 0; x < w.size(); ++x)
        for (std::size_t y = 0; y < step.size(); ++y) scratch[x * step.size() + y] = w[x] * step[y];
      w.swap(scratch);
    }
    double gap = 0.0;
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t x = 0; x < lead; ++x)
        for (std::size_t y = 0; y < kn; ++y)
          gap = std::max(gap, std::abs(w[x] * last(y, r) - ref[r][x * kn + y]));
    ++v.samples_used;
    if (gap > worst) {
      worst = gap;
      worst_point = p;
    }
  };

  for (std::size_t r = 0; r < k; ++r) {
    std::vector<double> p(k, 0.0);
    p[r] = 1.0;
    visit(p);
  }
  if (k <= 32) {
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a + 1; b < k; ++b) {
        std::vector<double> p(k, 0.0);
        p[a] = 0.5;
        p[b] = 0.5;
        visit(p);
      }
  }
  auto rng = detail::seeded_stream(seed, 0);
  for (std::size_t s = interior_budget(num_samples, k); s > 0; --s) visit(flat_dirichlet(k, rng));

  v.residual = worst;
  if (worst <= tol) {
    v.status = ConsistencyStatus::consistent_at_samples;
    v.note = "matrix identity held at every sampled point";
  } else {
    v.status = ConsistencyStatus::inconsistent;
    v.witness = ProbabilityVector::raw(std::move(worst_point));
    v.note = "matrix identity fails at the witness; by itself this does not decide equivalence";
  }
  if (v.non_stochastic_input) v.note += "; " + substochastic_note(h);
  return v;
}

StructuralResult check_structural_sufficient(const std::vector<DenseMatrix>& lifted, double tol) {
  StructuralResult res;
  for (std::size_t i = 0; i < lifted.size(); ++i) {
    const auto& m = lifted[i];
    double dev = 0.0;
    for (std::size_t j = 1; j < m.cols(); ++j)
      for (std::size_t r = 0; r < m.rows(); ++r) dev = std::max(dev, std::abs(m(r, j) - m(r, 0)));
    if (dev <= tol) res.constant_column_ids.push_back(i + 1);
  }
  res.satisfied = res.constant_column_ids.size() + 1 >= lifted.size();
  return res;
}

}  // namespace stplogic
