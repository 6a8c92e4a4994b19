#pragma once

#include "eikonal/rational.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eikonal {

enum class VertexKind { boundary, interior };

struct Vertex {
    std::string id;
    VertexKind kind = VertexKind::interior;
};

/// Edge oriented from `tail` to `head`; offsets along the edge are measured
/// from the tail. Infinite edges are stored truncated (see MetricGraph).
struct Edge {
    std::string id;
    std::size_t tail = 0;
    std::size_t head = 0;
    Rational length;
    bool infinite = false;
};

/// One end of an edge as seen from a vertex.
struct EdgeEnd {
    std::size_t edge = 0;
    bool at_head = false;

    friend bool operator==(const EdgeEnd&, const EdgeEnd&) = default;
};

struct Diagnostic {
    std::size_t line = 0;  // 0 when not tied to a source line
    std::string message;
    std::string subject;   // id of the offending vertex or edge, if any
};

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

/// Finite metric graph with exact rational edge lengths.
class MetricGraph {
public:
    std::size_t add_vertex(std::string id, VertexKind kind);
    std::size_t add_edge(std::string id, std::size_t tail, std::size_t head, Rational length,
                         bool infinite = false);

    /// Connected, >= 1 boundary vertex, boundary valence 1, interior valence >= 3,
    /// positive lengths. Returns every violation found.
    std::vector<Diagnostic> violations() const;
    void validate() const;

    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const Vertex& vertex(std::size_t v) const { return vertices_.at(v); }
    const Edge& edge(std::size_t e) const { return edges_.at(e); }
    const std::vector<EdgeEnd>& incident(std::size_t v) const { return incident_.at(v); }
    std::size_t valence(std::size_t v) const { return incident_.at(v).size(); }

    std::optional<std::size_t> find_vertex(std::string_view id) const;
    std::optional<std::size_t> find_edge(std::string_view id) const;
    std::size_t vertex_index(std::string_view id) const;
    std::size_t edge_index(std::string_view id) const;

    std::size_t end_vertex(const EdgeEnd& end) const {
        return end.at_head ? edges_[end.edge].head : edges_[end.edge].tail;
    }

    friend bool operator==(const MetricGraph& a, const MetricGraph& b);

private:
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeEnd>> incident_;
};

/// A point of the graph. Points at an edge end are canonicalised to the
/// corresponding vertex, so equality is geometric equality.
struct GraphPoint {
    enum class Kind { vertex, edge };

    Kind kind = Kind::vertex;
    std::size_t index = 0;  // vertex index or edge index
    Rational offset;        // from the edge tail; zero for vertices

    static GraphPoint at_vertex(std::size_t v) { return GraphPoint{Kind::vertex, v, Rational(0)}; }
    /// Throws std::out_of_range when the offset lies outside [0, length].
    static GraphPoint on_edge(const MetricGraph& g, std::size_t edge, const Rational& offset);

    bool is_vertex() const { return kind == Kind::vertex; }

    friend bool operator==(const GraphPoint& a, const GraphPoint& b) {
        return a.kind == b.kind && a.index == b.index && a.offset == b.offset;
    }
    friend bool operator<(const GraphPoint& a, const GraphPoint& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        if (a.index != b.index) return a.index < b.index;
        return a.offset < b.offset;
    }
};

std::string describe(const MetricGraph& g, const GraphPoint& p);

/// Controlling vertices and the horizon.
struct ControlConfig {
    std::vector<std::size_t> sigma;  // vertex indices, strictly increasing
    Rational horizon;
};

/// Graph plus control data, as read from a description file.
struct GraphSpec {
    MetricGraph graph;
    ControlConfig control;
};

/// Parses the line-oriented description:
///   vertex <id> boundary|interior
///   edge <id> <v1> <v2> <p>/<q>|inf
///   sigma <id> ...
///   horizon <p>/<q>
/// Infinite edges are truncated to length horizon + 1 and flagged; their
/// second endpoint must be a boundary vertex outside sigma.
/// Throws ValidationError listing every violation with its line.
GraphSpec parse_graph(std::string_view text);

/// Canonical text form; parse_graph(serialize_graph(s)) reproduces s.
std::string serialize_graph(const GraphSpec& spec);

/// Exact geodesic distance.
Rational geodesic_distance(const MetricGraph& g, const GraphPoint& x, const GraphPoint& y);

/// Distances from a point to every vertex.
std::vector<Rational> vertex_distances(const MetricGraph& g, const GraphPoint& from);

/// Distances from a vertex set to every vertex.
std::vector<Rational> vertex_distances(const MetricGraph& g, const std::vector<std::size_t>& sources);

/// Wave filling time: max over boundary vertices of the distance from gamma.
Rational filling_time(const MetricGraph& g, std::size_t gamma);

struct BallSegment {
    std::size_t edge = 0;
    Interval span;  // offsets, lo < hi
    friend bool operator==(const BallSegment&, const BallSegment&) = default;
};

/// The closed metric ball of radius T around sigma: positive-length edge
/// segments plus the vertices it contains.
struct MetricBall {
    std::vector<BallSegment> segments;  // ordered by edge then offset
    std::vector<std::size_t> vertices;

    bool contains(const MetricGraph& g, const GraphPoint& p) const;
    /// Every point of this ball lies in `other`.
    bool subset_of(const MetricBall& other) const;
    bool covers_graph(const MetricGraph& g) const;
};

MetricBall metric_ball(const MetricGraph& g, const std::vector<std::size_t>& sigma, const Rational& radius);

}  // namespace eikonal
