#pragma once

#include "eikonal/canon_algebraic.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace eikonal {

struct SuppClass {
    std::size_t family = 0;
    std::vector<TermRef> members;      // sorted
    std::vector<std::size_t> support;  // cell indices, sorted
};

/// Closure of "supports intersect" over all sources of one family.
std::vector<SuppClass> supp_partition(const SourceParametricForm& form, std::size_t family);

/// A stretch of a merged cell lying on one edge.
struct CellPiece {
    std::size_t edge = 0;
    Interval span;
    bool reversed = false;  // parameter runs from span.hi down
    Rational length() const { return span.length(); }
    friend bool operator==(const CellPiece&, const CellPiece&) = default;
};

/// A family of the geometric form. Each cell is a chain of pieces swept at
/// unit speed; pieces may pass through vertices.
struct GFamily {
    Rational length;
    std::vector<std::vector<CellPiece>> cells;
    std::vector<std::vector<EikonalTerm>> terms;  // per source; directions over cells
    std::vector<std::size_t> origin;              // subfamily indices, in chain order

    std::size_t size() const { return cells.size(); }
    /// Boundary point of every cell at r = 0 (at_end false) or r = length.
    std::vector<GraphPoint> boundary(const MetricGraph& g, bool at_end) const;
    GraphPoint point_at(const MetricGraph& g, std::size_t cell, const Rational& r) const;
    void flip();
};

/// Family restricted to one supp class.
struct SubFamily {
    std::size_t family = 0;
    std::vector<std::size_t> cell_indices;  // into the source family
    GFamily data;
};

std::vector<SubFamily> split_families(const SourceParametricForm& form);

struct Connection {
    bool flip_first = false;   // read the first family backwards so it ends at the junction
    bool flip_second = false;  // read the second family backwards so it starts there
    /// bijection[k'] = cell of the first family meeting cell k' of the second.
    std::vector<std::size_t> bijection;
};

/// Connection of a's end to b's start under some choice of orientations, or
/// nothing. A boundary point shared by several cells makes the bijection
/// ambiguous; that is reported through `ambiguity` and treated as no
/// connection.
std::optional<Connection> family_connectable(const MetricGraph& g, std::size_t sources, const GFamily& a,
                                             const GFamily& b, std::string* ambiguity = nullptr);

struct GeometricForm {
    GraphSpec spec;
    std::vector<GFamily> families;
    std::vector<GraphPoint> critical;
    std::vector<std::string> diagnostics;
};

/// Chains of connectable subfamilies concatenated cell-wise. Throws
/// PipelineError on an ambiguous or cyclic chain.
GeometricForm merge_families(const SourceParametricForm& form, std::vector<SubFamily> subfamilies);

/// split_families followed by merge_families.
GeometricForm geometric_form(const SourceParametricForm& form);

/// Invariant violations (empty when sound).
std::vector<std::string> check_geometric(const GeometricForm& form);

}  // namespace eikonal
