#pragma once

#include "eikonal/rational.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace eikonal {

using Matrix = Eigen::MatrixXd;

/// Dimension of the (non-unital) algebra spanned by all words in the
/// generators. Float version: a word counts as new when its residual against
/// the span found so far exceeds tol relative to its norm.
std::size_t word_closure_dimension(std::span<const Matrix> generators, double tol = 1e-9);

/// Exact version.
std::size_t word_closure_dimension(std::span<const RationalMatrix> generators);

/// Exact comparison of two representations given by generator tuples
/// (a[k] and b[k] represent the same generator). Equivalent iff the
/// dimensions agree and traces agree on a spanning set of the joint word
/// algebra. On rejection `why` names the first mismatch.
bool trace_equivalent(std::span<const RationalMatrix> a, std::span<const RationalMatrix> b,
                      std::string* why = nullptr, std::size_t* longest_word = nullptr);

/// Orthogonal Y with Y a[k] = b[k] Y for every k, verified to tol, or
/// nothing when the only intertwiners are singular.
std::optional<Matrix> orthogonal_intertwiner(std::span<const Matrix> a, std::span<const Matrix> b,
                                             double tol = 1e-9);

struct IrrepBlock {
    std::size_t dim = 0;
    std::size_t multiplicity = 0;
    friend bool operator==(const IrrepBlock&, const IrrepBlock&) = default;
};

/// Isotypic decomposition of the algebra generated by symmetric matrices:
/// irreducible dimension and multiplicity per component, ordered by the
/// component's eigenvalue under a fixed generic central element.
std::vector<IrrepBlock> decompose(std::span<const Matrix> generators, double tol = 1e-9);

Matrix to_matrix(const RationalMatrix& m);

/// Orthonormal basis (columns) of the span of exact vectors via a positive
/// definite Gram factor; also returns the exact rank.
struct SpanBasis {
    std::vector<std::size_t> chosen;  // indices of a maximal independent subset
    RationalMatrix gram;              // Gram matrix of the chosen vectors
    Matrix chol_inv;                  // L^{-1} with gram = L L^T
};
SpanBasis span_basis(std::span<const RationalVector> vectors);

}  // namespace eikonal
