#include "eikonal/graph.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace eikonal {

namespace {

std::string join_messages(const std::vector<Diagnostic>& ds) {
    std::ostringstream os;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (i) os << "; ";
        if (ds[i].line) os << "line " << ds[i].line << ": ";
        os << ds[i].message;
    }
    return os.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join_messages(diagnostics)), diagnostics_(std::move(diagnostics)) {}

std::size_t MetricGraph::add_vertex(std::string id, VertexKind kind) {
    vertices_.push_back(Vertex{std::move(id), kind});
    incident_.emplace_back();
    return vertices_.size() - 1;
}

std::size_t MetricGraph::add_edge(std::string id, std::size_t tail, std::size_t head, Rational length,
                                  bool infinite) {
    const std::size_t e = edges_.size();
    edges_.push_back(Edge{std::move(id), tail, head, std::move(length), infinite});
    incident_.at(tail).push_back(EdgeEnd{e, false});
    incident_.at(head).push_back(EdgeEnd{e, true});
    return e;
}

std::vector<Diagnostic> MetricGraph::violations() const {
    std::vector<Diagnostic> out;
    if (vertices_.empty()) {
        out.push_back({0, "graph has no vertices", ""});
        return out;
    }
    bool any_boundary = false;
    for (std::size_t v = 0; v < vertices_.size(); ++v) {
        const auto& vx = vertices_[v];
        const std::size_t d = valence(v);
        if (vx.kind == VertexKind::boundary) {
            any_boundary = true;
            if (d != 1) {
                out.push_back({0, "boundary vertex '" + vx.id + "' has valence " + std::to_string(d) + ", expected 1",
                               vx.id});
            }
        } else if (d == 2) {
            out.push_back({0, "valence-2 interior vertex '" + vx.id + "'", vx.id});
        } else if (d < 3) {
            out.push_back({0, "interior vertex '" + vx.id + "' has valence " + std::to_string(d) + ", expected >= 3",
                           vx.id});
        }
    }
    if (!any_boundary) out.push_back({0, "graph has no boundary vertex", ""});
    for (const auto& e : edges_) {
        if (e.length <= 0) out.push_back({0, "non-positive length on edge '" + e.id + "'", e.id});
    }
    // Connectivity by BFS from vertex 0.
    std::vector<bool> seen(vertices_.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (const auto& end : incident_[v]) {
            const auto& e = edges_[end.edge];
            auto w = end.at_head ? e.tail : e.head;
            if (!seen[w]) {
                seen[w] = true;
                stack.push_back(w);
            }
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        out.push_back({0, "disconnected graph", ""});
    }
    return out;
}

void MetricGraph::validate() const {
    auto v = violations();
    if (!v.empty()) throw ValidationError(std::move(v));
}

std::optional<std::size_t> MetricGraph::find_vertex(std::string_view id) const {
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        if (vertices_[i].id == id) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> MetricGraph::find_edge(std::string_view id) const {
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (edges_[i].id == id) return i;
    }
    return std::nullopt;
}

std::size_t MetricGraph::vertex_index(std::string_view id) const {
    if (auto v = find_vertex(id)) return *v;
    throw std::out_of_range("unknown vertex '" + std::string(id) + "'");
}

std::size_t MetricGraph::edge_index(std::string_view id) const {
    if (auto e = find_edge(id)) return *e;
    throw std::out_of_range("unknown edge '" + std::string(id) + "'");
}

bool operator==(const MetricGraph& a, const MetricGraph& b) {
    if (a.vertices_.size() != b.vertices_.size() || a.edges_.size() != b.edges_.size()) return false;
    for (std::size_t i = 0; i < a.vertices_.size(); ++i) {
        if (a.vertices_[i].id != b.vertices_[i].id || a.vertices_[i].kind != b.vertices_[i].kind) return false;
    }
    for (std::size_t i = 0; i < a.edges_.size(); ++i) {
        const auto& x = a.edges_[i];
        const auto& y = b.edges_[i];
        if (x.id != y.id || x.tail != y.tail || x.head != y.head || x.length != y.length ||
            x.infinite != y.infinite) {
            return false;
        }
    }
    return true;
}

GraphPoint GraphPoint::on_edge(const MetricGraph& g, std::size_t edge, const Rational& offset) {
    const auto& e = g.edge(edge);
    if (offset < 0 || offset > e.length) {
        throw std::out_of_range("offset " + to_string(offset) + " outside edge '" + e.id + "'");
    }
    if (offset == 0) return at_vertex(e.tail);
    if (offset == e.length) return at_vertex(e.head);
    return GraphPoint{Kind::edge, edge, offset};
}

std::string describe(const MetricGraph& g, const GraphPoint& p) {
    if (p.is_vertex()) return g.vertex(p.index).id;
    return g.edge(p.index).id + "@" + to_string(p.offset);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::vector<std::string> tokenize(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream is{std::string(line)};
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

}  // namespace

GraphSpec parse_graph(std::string_view text) {
    std::vector<Diagnostic> errors;
    GraphSpec spec;
    auto& g = spec.graph;
    std::map<std::string, std::size_t, std::less<>> decl_line;

    struct PendingEdge {
        std::size_t line;
        std::string id;
        std::string tail;
        std::string head;
        std::optional<Rational> length;  // nullopt for infinite
    };
    std::vector<PendingEdge> pending;
    std::vector<std::pair<std::size_t, std::string>> sigma_ids;
    std::optional<Rational> horizon;
    std::size_t horizon_line = 0;

    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        auto tok = tokenize(raw);
        if (tok.empty()) continue;
        const auto& kw = tok[0];
        if (kw == "vertex") {
            if (tok.size() != 3 || (tok[2] != "boundary" && tok[2] != "interior")) {
                errors.push_back({lineno, "syntax error: expected 'vertex <id> boundary|interior'", ""});
                continue;
            }
            if (g.find_vertex(tok[1]) || decl_line.count(tok[1])) {
                errors.push_back({lineno, "duplicate id '" + tok[1] + "'", tok[1]});
                continue;
            }
            g.add_vertex(tok[1], tok[2] == "boundary" ? VertexKind::boundary : VertexKind::interior);
            decl_line[tok[1]] = lineno;
        } else if (kw == "edge") {
            if (tok.size() != 5) {
                errors.push_back({lineno, "syntax error: expected 'edge <id> <v1> <v2> <length>'", ""});
                continue;
            }
            PendingEdge pe{lineno, tok[1], tok[2], tok[3], std::nullopt};
            if (tok[4] != "inf") {
                try {
                    pe.length = parse_rational(tok[4]);
                } catch (const std::invalid_argument& ex) {
                    errors.push_back({lineno, std::string("syntax error: ") + ex.what(), tok[1]});
                    continue;
                }
            }
            if (decl_line.count(tok[1])) {
                errors.push_back({lineno, "duplicate id '" + tok[1] + "'", tok[1]});
                continue;
            }
            decl_line[tok[1]] = lineno;
            pending.push_back(std::move(pe));
        } else if (kw == "sigma") {
            if (tok.size() < 2) {
                errors.push_back({lineno, "syntax error: 'sigma' needs at least one vertex id", ""});
                continue;
            }
            for (std::size_t i = 1; i < tok.size(); ++i) sigma_ids.emplace_back(lineno, tok[i]);
        } else if (kw == "horizon") {
            if (tok.size() != 2) {
                errors.push_back({lineno, "syntax error: expected 'horizon <p>/<q>'", ""});
                continue;
            }
            if (horizon) {
                errors.push_back({lineno, "duplicate horizon", ""});
                continue;
            }
            try {
                horizon = parse_rational(tok[1]);
                horizon_line = lineno;
            } catch (const std::invalid_argument& ex) {
                errors.push_back({lineno, std::string("syntax error: ") + ex.what(), ""});
            }
        } else {
            errors.push_back({lineno, "syntax error: unknown directive '" + kw + "'", ""});
        }
    }

    if (!horizon) {
        errors.push_back({0, "missing horizon", ""});
    } else if (*horizon <= 0) {
        errors.push_back({horizon_line, "horizon must be positive", ""});
    }

    for (auto& pe : pending) {
        auto t = g.find_vertex(pe.tail);
        auto h = g.find_vertex(pe.head);
        if (!t || !h) {
            errors.push_back({pe.line, "edge '" + pe.id + "' refers to an unknown vertex", pe.id});
            continue;
        }
        bool infinite = !pe.length.has_value();
        Rational len = infinite ? (horizon ? Rational(*horizon + 1) : Rational(1)) : *pe.length;
        if (!infinite && len <= 0) {
            errors.push_back({pe.line, "non-positive length on edge '" + pe.id + "'", pe.id});
            continue;
        }
        if (infinite && g.vertex(*h).kind != VertexKind::boundary) {
            errors.push_back({pe.line, "infinite edge '" + pe.id + "' must end at a boundary vertex", pe.id});
            continue;
        }
        g.add_edge(pe.id, *t, *h, len, infinite);
    }

    std::vector<std::size_t> sigma;
    for (const auto& [line, id] : sigma_ids) {
        auto v = g.find_vertex(id);
        if (!v) {
            errors.push_back({line, "sigma refers to unknown vertex '" + id + "'", id});
            continue;
        }
        if (g.vertex(*v).kind != VertexKind::boundary) {
            errors.push_back({line, "sigma vertex '" + id + "' is not a boundary vertex", id});
            continue;
        }
        for (const auto& end : g.incident(*v)) {
            const auto& e = g.edge(end.edge);
            if (e.infinite && end.at_head) {
                errors.push_back({line, "sigma vertex '" + id + "' is the far end of an infinite edge", id});
            }
        }
        sigma.push_back(*v);
    }
    std::sort(sigma.begin(), sigma.end());
    sigma.erase(std::unique(sigma.begin(), sigma.end()), sigma.end());
    if (sigma.empty() && sigma_ids.empty()) errors.push_back({0, "missing sigma", ""});

    if (errors.empty()) {
        for (auto d : g.violations()) {
            if (auto it = decl_line.find(d.subject); it != decl_line.end()) d.line = it->second;
            errors.push_back(std::move(d));
        }
    }
    if (!errors.empty()) {
        std::stable_sort(errors.begin(), errors.end(),
                         [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
        throw ValidationError(std::move(errors));
    }
    spec.control.sigma = std::move(sigma);
    spec.control.horizon = *horizon;
    return spec;
}

std::string serialize_graph(const GraphSpec& spec) {
    std::ostringstream os;
    const auto& g = spec.graph;
    for (const auto& v : g.vertices()) {
        os << "vertex " << v.id << ' ' << (v.kind == VertexKind::boundary ? "boundary" : "interior") << '\n';
    }
    for (const auto& e : g.edges()) {
        os << "edge " << e.id << ' ' << g.vertex(e.tail).id << ' ' << g.vertex(e.head).id << ' '
           << (e.infinite ? std::string("inf") : to_string(e.length)) << '\n';
    }
    os << "sigma";
    for (auto s : spec.control.sigma) os << ' ' << g.vertex(s).id;
    os << '\n' << "horizon " << to_string(spec.control.horizon) << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// Metric

namespace {

// Dijkstra on the vertex set with the given initial labels (nullopt = +inf).
std::vector<Rational> dijkstra(const MetricGraph& g, std::vector<std::optional<Rational>> dist) {
    const std::size_t n = g.vertices().size();
    std::vector<bool> done(n, false);
    for (std::size_t iter = 0; iter < n; ++iter) {
        std::size_t best = n;
        for (std::size_t v = 0; v < n; ++v) {
            if (!done[v] && dist[v] && (best == n || *dist[v] < *dist[best])) best = v;
        }
        if (best == n) break;
        done[best] = true;
        for (const auto& end : g.incident(best)) {
            const auto& e = g.edge(end.edge);
            auto w = end.at_head ? e.tail : e.head;
            Rational cand = *dist[best] + e.length;
            if (!dist[w] || cand < *dist[w]) dist[w] = cand;
        }
    }
    std::vector<Rational> out(n);
    for (std::size_t v = 0; v < n; ++v) {
        if (!dist[v]) throw std::logic_error("geodesic distance on a disconnected graph");
        out[v] = *dist[v];
    }
    return out;
}

}  // namespace

std::vector<Rational> vertex_distances(const MetricGraph& g, const GraphPoint& from) {
    std::vector<std::optional<Rational>> init(g.vertices().size());
    if (from.is_vertex()) {
        init[from.index] = Rational(0);
    } else {
        const auto& e = g.edge(from.index);
        init[e.tail] = from.offset;
        Rational back = e.length - from.offset;
        if (!init[e.head] || back < *init[e.head]) init[e.head] = back;
    }
    return dijkstra(g, std::move(init));
}

std::vector<Rational> vertex_distances(const MetricGraph& g, const std::vector<std::size_t>& sources) {
    std::vector<std::optional<Rational>> init(g.vertices().size());
    for (auto s : sources) init.at(s) = Rational(0);
    return dijkstra(g, std::move(init));
}

Rational geodesic_distance(const MetricGraph& g, const GraphPoint& x, const GraphPoint& y) {
    auto d = vertex_distances(g, x);
    if (y.is_vertex()) return d[y.index];
    const auto& e = g.edge(y.index);
    Rational best = min(d[e.tail] + y.offset, d[e.head] + e.length - y.offset);
    if (!x.is_vertex() && x.index == y.index) best = min(best, abs(x.offset - y.offset));
    return best;
}

Rational filling_time(const MetricGraph& g, std::size_t gamma) {
    auto d = vertex_distances(g, GraphPoint::at_vertex(gamma));
    Rational best = 0;
    for (std::size_t v = 0; v < d.size(); ++v) {
        if (g.vertex(v).kind == VertexKind::boundary && best < d[v]) best = d[v];
    }
    return best;
}

MetricBall metric_ball(const MetricGraph& g, const std::vector<std::size_t>& sigma, const Rational& radius) {
    auto d = vertex_distances(g, sigma);
    MetricBall ball;
    for (std::size_t v = 0; v < d.size(); ++v) {
        if (d[v] <= radius) ball.vertices.push_back(v);
    }
    for (std::size_t ei = 0; ei < g.edges().size(); ++ei) {
        const auto& e = g.edge(ei);
        std::vector<Interval> parts;
        if (d[e.tail] < radius) parts.push_back({Rational(0), min(e.length, radius - d[e.tail])});
        if (d[e.head] < radius) parts.push_back({max(Rational(0), e.length - (radius - d[e.head])), e.length});
        for (auto& iv : interval_union(std::move(parts))) {
            if (iv.lo < iv.hi) ball.segments.push_back(BallSegment{ei, std::move(iv)});
        }
    }
    return ball;
}

bool MetricBall::contains(const MetricGraph& g, const GraphPoint& p) const {
    if (p.is_vertex()) return std::find(vertices.begin(), vertices.end(), p.index) != vertices.end();
    (void)g;
    return std::any_of(segments.begin(), segments.end(),
                       [&](const BallSegment& s) { return s.edge == p.index && s.span.contains(p.offset); });
}

bool MetricBall::subset_of(const MetricBall& other) const {
    for (auto v : vertices) {
        if (std::find(other.vertices.begin(), other.vertices.end(), v) == other.vertices.end()) return false;
    }
    for (const auto& s : segments) {
        bool inside = std::any_of(other.segments.begin(), other.segments.end(), [&](const BallSegment& o) {
            return o.edge == s.edge && o.span.lo <= s.span.lo && s.span.hi <= o.span.hi;
        });
        if (!inside) return false;
    }
    return true;
}

bool MetricBall::covers_graph(const MetricGraph& g) const {
    if (vertices.size() != g.vertices().size()) return false;
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        bool whole = std::any_of(segments.begin(), segments.end(), [&](const BallSegment& s) {
            return s.edge == e && s.span.lo == 0 && s.span.hi == g.edge(e).length;
        });
        if (!whole) return false;
    }
    return true;
}

}  // namespace eikonal
