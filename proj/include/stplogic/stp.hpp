#pragma once

#include <cstddef>
#include <vector>

#include "stplogic/types.hpp"

// Structured linear-algebra kernel: semi-tensor product, Kronecker product,
// swap / power-reduce / projection operators, Khatri-Rao product. Logical
// matrices get index-arithmetic fast paths; dense expansion is on demand.

namespace stplogic {

/// Ordinary matrix product.
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);

/// Matrix-vector product.
std::vector<double> mat_vec(const DenseMatrix& a, const std::vector<double>& x);

/// Kronecker product, shape (m*p) x (n*q).
DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b, std::size_t dim_cap = kDefaultDimCap);

/// Kronecker product of vectors (flat convenience form of kron on columns).
std::vector<double> kron_vec(const std::vector<double>& a, const std::vector<double>& b);

/// Semi-tensor product (A (x) I_{l/n})(B (x) I_{l/p}) with l = lcm(n, p).
/// Degenerates to the ordinary product when cols(A) = rows(B).
DenseMatrix stp(const DenseMatrix& a, const DenseMatrix& b, std::size_t dim_cap = kDefaultDimCap);

/// Swap matrix W_[m,n]: the mn x mn permutation with
/// Col_{(i-1)n+j} = delta_mn^{i+(j-1)m}; realizes x (stp) y = W (stp) y (stp) x.
LogicalMatrix swap_matrix(std::size_t m, std::size_t n, std::size_t dim_cap = kDefaultDimCap);

/// Power-reduced matrix R_k (k^2 x k): column i is delta_{k^2}^{(i-1)k+i},
/// so that x (stp) x = R_k x for unit x.
LogicalMatrix power_reduce_matrix(std::size_t k, std::size_t dim_cap = kDefaultDimCap);

/// Projection matrix Phi_U = (x)_j gamma_j with gamma_j = I_{k_j} for j in U
/// and 1^T_{k_j} otherwise. Maps a joint unit state to its sub-state on U and
/// a joint distribution to its marginal on U. `subset` holds 1-based node
/// ids, strictly ascending.
LogicalMatrix projection_matrix(const std::vector<std::size_t>& alphabets,
                                const std::vector<std::size_t>& subset,
                                std::size_t dim_cap = kDefaultDimCap);

/// Khatri-Rao product: column j of the result is Col_j(A) (x) Col_j(B).
DenseMatrix khatri_rao(const DenseMatrix& a, const DenseMatrix& b,
                       std::size_t dim_cap = kDefaultDimCap);

// Logical (index-arithmetic) fast paths. Semantics match the dense
// operations on dense expansions exactly.

/// A (x) I_t for logical A.
LogicalMatrix kron_identity_logical(const LogicalMatrix& a, std::size_t t,
                                    std::size_t dim_cap = kDefaultDimCap);

/// Kronecker product of logical matrices.
LogicalMatrix kron_logical(const LogicalMatrix& a, const LogicalMatrix& b,
                           std::size_t dim_cap = kDefaultDimCap);

/// Ordinary product of logical matrices (cols(a) must equal rows(b)).
LogicalMatrix multiply_logical(const LogicalMatrix& a, const LogicalMatrix& b);

/// Semi-tensor product of logical matrices; dense(stp_logical(A,B)) equals
/// stp(dense(A), dense(B)).
LogicalMatrix stp_logical(const LogicalMatrix& a, const LogicalMatrix& b,
                          std::size_t dim_cap = kDefaultDimCap);

/// Khatri-Rao product of logical matrices (equal column counts).
LogicalMatrix khatri_rao_logical(const LogicalMatrix& a, const LogicalMatrix& b,
                                 std::size_t dim_cap = kDefaultDimCap);

/// A * L for dense A and logical L: gathers columns of A (no flops).
DenseMatrix dense_times_logical(const DenseMatrix& a, const LogicalMatrix& l);

/// L * A for logical L and dense A: row u of the result accumulates the rows
/// of A selected by L's unit entries.
DenseMatrix logical_times_dense(const LogicalMatrix& l, const DenseMatrix& a);

/// L * x for logical L.
std::vector<double> logical_apply(const LogicalMatrix& l, const std::vector<double>& x);

}  // namespace stplogic
