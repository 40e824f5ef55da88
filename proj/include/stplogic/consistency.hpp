#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stplogic/types.hpp"

namespace stplogic {

/// Joint dimension up to which the reduced transition matrix is cached.
inline constexpr std::size_t kReducedCacheDim = 2048;

/// Ordered-tuple budget for the exact polynomial-identity check.
inline constexpr std::size_t kExactTermCap = 1000000;

/// Default residual tolerance for the consistency checkers.
inline constexpr double kConsistencyTol = 1e-9;

/// Column-equality tolerance for the structural sufficient condition.
inline constexpr double kStructuralTol = 1e-12;

/// The factored one-step operator of a system with per-node matrices
/// [Q^1..Q^n], each k_i x k over the joint dimension k. The full operator on
/// n-fold products (size k x k^n) is never built; every use goes through the
/// factored forms, whose cost is polynomial in k.
class HOperator {
 public:
  explicit HOperator(std::vector<DenseMatrix> lifted, bool allow_substochastic = false,
                     double eps = kStochasticEps, std::size_t dim_cap = kDefaultDimCap);

  std::size_t n() const { return lifted_.size(); }
  std::size_t k() const { return k_; }
  const std::vector<DenseMatrix>& lifted() const { return lifted_; }
  const std::vector<std::size_t>& alphabets() const { return alphabets_; }
  bool non_stochastic_input() const { return non_stochastic_; }
  bool reduced_cached() const { return reduced_.has_value(); }

  /// Doubles held by this operator; stays polynomial in k by construction.
  std::size_t memory_footprint_doubles() const;

  /// Joint product step: returns the Kronecker product of all Q^i p.
  std::vector<double> apply_power(const std::vector<double>& p) const;

  /// Reduced linear step: (Q^1 * ... * Q^n) p, streamed column-by-column when
  /// the joint dimension is too large to cache the product matrix.
  std::vector<double> apply_reduced(const std::vector<double>& p) const;

  /// Column r of the reduced matrix; equals apply at the r-th vertex.
  std::vector<double> reduced_column(std::size_t r_1based) const;

 private:
  std::vector<DenseMatrix> lifted_;
  std::vector<std::size_t> alphabets_;
  std::size_t k_ = 0;
  bool non_stochastic_ = false;
  std::optional<DenseMatrix> reduced_;
};

ProbabilityVector h_apply_power(const HOperator& h, const ProbabilityVector& p);
ProbabilityVector h_apply_reduced(const HOperator& h, const ProbabilityVector& p);

/// Sup-norm gap between the two one-step laws at a single distribution.
double point_consistency(const HOperator& h, const ProbabilityVector& p);

enum class ConsistencyStatus { consistent, inconsistent, consistent_at_samples };
enum class CheckMethod { sampled, exact, structural, matrix_condition };

struct ConsistencyVerdict {
  ConsistencyStatus status = ConsistencyStatus::consistent;
  CheckMethod method = CheckMethod::sampled;
  std::optional<ProbabilityVector> witness;  // present when inconsistent
  double residual = 0.0;                     // worst residual seen
  std::size_t samples_used = 0;
  double tolerance = kConsistencyTol;
  bool non_stochastic_input = false;
  std::string note;
};

/// Evaluates both laws at every vertex, at all edge midpoints when k <= 32,
/// and at seeded flat-Dirichlet points up to the num_samples budget. A pass is
/// reported as consistent-at-samples, never as a proof.
ConsistencyVerdict check_consistency_sampled(const HOperator& h, std::size_t num_samples,
                                             double tol = kConsistencyTol,
                                             std::uint64_t seed = 0);

/// Decision procedure: the two laws agree on the whole simplex iff the
/// symmetrized coefficient tensors of their degree-n forms match. Compares
/// the coefficient of every multiset of column indices within tol; complete
/// up to floating point, but requires k^n ordered terms within term_cap.
ConsistencyVerdict check_consistency_exact(const HOperator& h, double tol = kConsistencyTol,
                                           std::size_t term_cap = kExactTermCap);

/// Sampled test of the stronger matrix identity (reduced matrix equal to the
/// operator contracted with n-1 copies of p). Sufficient for consistency when
/// it holds for all p, but its failure decides nothing; pairs exist whose
/// laws agree at a point where this matrix identity fails.
ConsistencyVerdict check_corollary_matrix(const HOperator& h, std::size_t num_samples,
                                          double tol = kConsistencyTol, std::uint64_t seed = 0);

struct StructuralResult {
  bool satisfied = false;
  std::vector<std::size_t> constant_column_ids;  // 1-based factor positions
};

/// Sufficient condition: at least n-1 factors whose columns are all equal
/// within tol. Satisfied implies consistent; unsatisfied decides nothing.
StructuralResult check_structural_sufficient(const std::vector<DenseMatrix>& lifted,
                                             double tol = kStructuralTol);

}  // namespace stplogic
