#pragma once

#include "eikonal/algebra.hpp"
#include "eikonal/parametric_form.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace eikonal {

/// A term of a family block: source slot in sigma and index in its term list.
struct TermRef {
    std::size_t source = 0;
    std::size_t term = 0;
    friend auto operator<=>(const TermRef&, const TermRef&) = default;
};

struct NortClass {
    std::size_t family = 0;
    std::vector<TermRef> members;  // sorted
    std::size_t kappa = 0;         // exact rank of the member directions
    std::size_t closure_dim = 0;   // float dimension of the word closure
    std::size_t exact_closure_dim = 0;  // exact, computed in the class span
};

/// Closure of "directions not orthogonal" over all sources of one family.
std::vector<NortClass> nort_partition(const SourceParametricForm& form, std::size_t family);

/// A term in orthonormal coordinates of its block.
struct BlockTerm {
    std::size_t source = 0;
    AffineTime tau;
    Matrix projector;
};

/// Where a stretch of a merged block comes from.
struct BlockPiece {
    std::size_t family = 0;
    std::size_t nort_class = 0;  // index in nort_partition(form, family)
    bool reversed = false;       // piece parameter runs against the family's
    Rational offset;             // start inside the merged block
    Rational length;
};

struct ABlock {
    Rational length;
    std::size_t kappa = 0;
    std::vector<BlockTerm> terms;  // by source, then tau at length/2
    std::vector<BlockPiece> pieces;
    std::vector<IrrepBlock> minus;  // boundary algebra at r = 0
    std::vector<IrrepBlock> plus;   // boundary algebra at r = length
};

struct CanonicalFormA {
    GraphSpec spec;
    std::vector<ABlock> blocks;
    std::size_t longest_word = 0;  // longest word the equivalence tests needed
};

/// Generators of a boundary representation, one matrix per source. The exact
/// matrices (in a rational, non-orthonormal basis of the block) are present
/// for source blocks and drive all equivalence decisions.
struct BoundaryRep {
    std::vector<Matrix> mats;
    std::vector<RationalMatrix> exact;
};

/// Boundary representations at r = 0 and r = length.
std::pair<BoundaryRep, BoundaryRep> boundary_reps(const ABlock& block, std::size_t sources);

/// Orthogonal Y with Y rho(E) = rho'(E) Y for every generator, or nothing.
/// `why` receives the rejection reason.
std::optional<Matrix> equivalent(const BoundaryRep& rho, const BoundaryRep& rho_prime, std::string* why = nullptr);

/// One block per nort class of every family, before any merging.
std::vector<ABlock> source_blocks(const SourceParametricForm& form);

/// Canonical form: source blocks merged along chains of equivalent boundary
/// representations, each block oriented so that its smallest tau values sit
/// at r = 0. Throws PipelineError on an ambiguous or cyclic chain.
CanonicalFormA merge_chains(const SourceParametricForm& form);

/// Per-source block matrices sum tau(r) P at parameter r.
std::vector<Matrix> block_generators(const ABlock& block, std::size_t sources, const Rational& r);

/// Invariant violations of a canonical form (empty when sound).
std::vector<std::string> check_canonical_a(const CanonicalFormA& form);

}  // namespace eikonal
