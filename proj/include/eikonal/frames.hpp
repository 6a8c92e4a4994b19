#pragma once

#include "eikonal/canon_algebraic.hpp"
#include "eikonal/canon_geometric.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eikonal {

/// Per-source sorted set of values.
using Coordinates = std::vector<std::vector<Rational>>;

struct FrameEnd {
    std::size_t edge = 0;
    bool at_end = false;  // r = length
    friend auto operator<=>(const FrameEnd&, const FrameEnd&) = default;
};

struct FrameVertex {
    std::string id;
    Coordinates coords;
    std::vector<FrameEnd> ends;  // glued edge ends, sorted
};

struct FrameEdge {
    std::string id;
    Rational length;
    std::size_t tail = 0;  // vertex at r = 0
    std::size_t head = 0;  // vertex at r = length
    std::vector<std::vector<AffineTime>> coords;  // per source, sorted
    std::size_t origin = 0;  // block or merged family index
};

struct FrameGraph {
    enum class Kind { algebraic, geometric };
    Kind kind = Kind::algebraic;
    std::vector<std::string> sources;  // ids of the controlled vertices
    std::vector<FrameVertex> vertices;
    std::vector<FrameEdge> edges;

    Rational total_length() const;
    /// Coordinates of the point at parameter r of an edge (0 < r < length).
    Coordinates coordinates_at(std::size_t edge, const Rational& r) const;
    std::size_t valence(std::size_t v) const;
};

/// A point of the spectrum: an interior point of a block, or one point of the
/// cluster at a block end.
struct SpectrumPoint {
    std::size_t block = 0;
    bool interior = false;
    Rational r;                 // interior only
    bool at_end = false;        // boundary only
    std::size_t cluster_index = 0;
    Coordinates coords;
};

/// All boundary points of the spectrum with their coordinates.
std::vector<SpectrumPoint> spectrum_boundary(const CanonicalFormA& form);
/// The interior point at parameter r of a block.
SpectrumPoint spectrum_interior(const CanonicalFormA& form, std::size_t block, const Rational& r);

FrameGraph build_frame_algebraic(const CanonicalFormA& form);
FrameGraph build_frame_geometric(const GeometricForm& form);

/// Invariant violations of a frame (empty when sound).
std::vector<std::string> check_frame(const FrameGraph& frame);

struct OrdinaryVerdict {
    bool ordinary = true;
    std::size_t family = 0;
    std::vector<TermRef> nort_class;  // witness: differing classes sharing a term
    std::vector<TermRef> supp_class;
};

OrdinaryVerdict check_ordinary(const SourceParametricForm& form);

/// Where a stretch of an edge of the first frame lands in the second.
struct EdgeImage {
    std::size_t edge = 0;
    Rational offset;
    Rational length;
    std::size_t image_edge = 0;
    Rational image_offset;
    bool reversed = false;
};

struct FramePoint {
    bool vertex = false;
    std::size_t index = 0;  // vertex or edge
    Rational r;             // edge parameter
    friend bool operator==(const FramePoint&, const FramePoint&) = default;
};

/// Common refinement of two frames matched piece by piece. Vertices of one
/// frame may land inside an edge of the other (valence-2 vertices).
struct FrameIsometry {
    std::vector<EdgeImage> pieces;
    std::vector<std::pair<FramePoint, FramePoint>> vertices;
};

/// Isometry respecting coordinates, or nothing with the reason in `why`.
std::optional<FrameIsometry> frame_isometry(const FrameGraph& a, const FrameGraph& b, std::string* why = nullptr);

class ExpressionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Functional model: value of an expression in the generators E_<id> at a
/// frame point. Grammar: sums, differences, products, integer powers,
/// parentheses, rational or decimal constants.
Matrix evaluate_on_frame(const CanonicalFormA& form, const FrameGraph& frame, std::string_view expr,
                         const FramePoint& point);
Matrix evaluate_on_frame(const GeometricForm& form, const FrameGraph& frame, std::string_view expr,
                         const FramePoint& point);

}  // namespace eikonal
