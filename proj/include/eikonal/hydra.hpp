#pragma once

#include "eikonal/graph.hpp"

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace eikonal {

/// Raised when the construction detects an internal contradiction (for
/// example cells of one family with different lengths).
class PipelineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One traversal of an edge; forward means tail -> head.
struct Hop {
    std::size_t edge = 0;
    bool forward = true;
    friend bool operator==(const Hop&, const Hop&) = default;
    friend auto operator<=>(const Hop&, const Hop&) = default;
};

/// A scattering path from a controlled vertex. The amplitude is the product
/// of the Kirchhoff factors met along the way: 2/d for transmission and
/// (2 - d)/d for reflection at an interior vertex of valence d, and -1 for
/// reflection at a boundary vertex.
struct Ray {
    std::size_t source = 0;
    std::vector<Hop> hops;
    Rational amplitude;
    Rational last_start;  // path length at the start of the final hop
};

/// Every ray from `source` whose final hop starts before `horizon`,
/// lexicographically by hop sequence. Throws PipelineError past `max_rays`.
std::vector<Ray> trace_rays(const MetricGraph& g, std::size_t source, const Rational& horizon,
                            std::size_t max_rays = 200000);

/// A wave front travelling along one edge: all rays sharing the final hop
/// and its start time, with amplitudes summed. Fronts whose amplitudes cancel
/// exactly are dropped and do not propagate.
struct Front {
    std::size_t source = 0;
    Hop hop;
    Rational entry_time;
    Rational amplitude;
};

/// Aggregated propagation; equals trace_rays grouped by (final hop, start).
std::vector<Front> trace_fronts(const MetricGraph& g, std::size_t source, const Rational& horizon);

/// Arrival time of one front along its edge: t(s) = intercept + slope * s for
/// edge offsets s within `valid`, clipped to t <= horizon.
struct ArrivalFunction {
    std::size_t source = 0;
    std::size_t edge = 0;
    int slope = 1;
    Rational intercept;
    Rational amplitude;
    Interval valid;

    Rational time_at(const Rational& s) const { return intercept + (slope > 0 ? s : Rational(-s)); }
    /// Offset where the arrival time equals t.
    Rational offset_at(const Rational& t) const { return slope > 0 ? Rational(t - intercept) : Rational(intercept - t); }
    Interval time_range(const Interval& offsets) const;
};

/// Arrival functions on every edge; identical affine functions are merged by
/// summing amplitudes and zero sums are dropped. Sorted by (source, edge,
/// slope, intercept).
std::vector<ArrivalFunction> arrival_table(const MetricGraph& g, std::span<const Front> fronts,
                                           const Rational& horizon);
std::vector<ArrivalFunction> arrival_table(const MetricGraph& g, std::span<const Ray> rays,
                                           const Rational& horizon);

/// Open sub-interval (lo, hi) of an edge. The family parameter r runs from lo
/// (reversed == false) or from hi (reversed == true) at unit speed.
struct Cell {
    std::size_t edge = 0;
    Interval span;
    bool reversed = false;

    Rational length() const { return span.length(); }
    Rational offset_at(const Rational& r) const { return reversed ? Rational(span.hi - r) : Rational(span.lo + r); }
    GraphPoint point_at(const MetricGraph& g, const Rational& r) const {
        return GraphPoint::on_edge(g, edge, offset_at(r));
    }
    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Cells of equal length swept coherently by a determination set.
struct Family {
    std::vector<Cell> cells;
    Rational length;

    /// Reverse the parametrisation of every cell.
    void flip() {
        for (auto& c : cells) c.reversed = !c.reversed;
    }
    std::vector<GraphPoint> boundary(const MetricGraph& g, bool at_end) const;
};

struct Partition {
    std::vector<Family> families;
    std::vector<GraphPoint> critical;  // sorted, unique
};

/// Cuts every edge of the wave-filled domain at all breakpoints (vertices,
/// validity ends, same-source crossings, and every point reached at a time
/// that is critical for its source, to a fixpoint) and groups the atomic
/// cells into families by shared arrival functions. `extra_cuts` injects
/// additional points; the result stays a valid (over-refined) partition.
Partition build_cells_and_families(const MetricGraph& g, const ControlConfig& control,
                                   std::span<const ArrivalFunction> arrivals,
                                   std::span<const GraphPoint> extra_cuts = {});

}  // namespace eikonal
