#include "eikonal/frames.hpp"

#include "eikonal/disjoint_set.hpp"
#include "eikonal/log.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>

namespace eikonal {

namespace {

void normalise(Coordinates& c) {
    for (auto& list : c) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
}

Coordinates limits(const std::vector<std::vector<AffineTime>>& coords, const Rational& r) {
    Coordinates out(coords.size());
    for (std::size_t s = 0; s < coords.size(); ++s) {
        for (const auto& t : coords[s]) out[s].push_back(t.at(r));
    }
    normalise(out);
    return out;
}

std::vector<std::string> source_ids(const GraphSpec& spec) {
    std::vector<std::string> out;
    for (auto v : spec.control.sigma) out.push_back(spec.graph.vertex(v).id);
    return out;
}

// Ends 2l and 2l + 1 of edge l are glued when their coordinate sets meet for
// some source, or when `extra` says so; closed transitively.
void assemble_vertices(FrameGraph& frame, const std::vector<Coordinates>& end_coords,
                       const std::function<bool(std::size_t, std::size_t)>& extra) {
    const std::size_t n = end_coords.size();
    DisjointSet dsu(n);
    std::map<std::pair<std::size_t, Rational>, std::size_t> seen;
    for (std::size_t e = 0; e < n; ++e) {
        for (std::size_t s = 0; s < end_coords[e].size(); ++s) {
            for (const auto& x : end_coords[e][s]) {
                auto [it, fresh] = seen.emplace(std::make_pair(s, x), e);
                if (!fresh) dsu.unite(it->second, e);
            }
        }
    }
    if (extra) {
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                if (dsu.find(a) != dsu.find(b) && extra(a, b)) dsu.unite(a, b);
            }
        }
    }
    const std::size_t sources = frame.sources.size();
    for (const auto& cls : dsu.classes()) {
        FrameVertex v;
        v.id = "w" + std::to_string(frame.vertices.size());
        v.coords.assign(sources, {});
        for (auto e : cls) {
            FrameEnd end{e / 2, e % 2 == 1};
            v.ends.push_back(end);
            auto& edge = frame.edges[end.edge];
            (end.at_end ? edge.head : edge.tail) = frame.vertices.size();
            for (std::size_t s = 0; s < sources; ++s) {
                v.coords[s].insert(v.coords[s].end(), end_coords[e][s].begin(), end_coords[e][s].end());
            }
        }
        normalise(v.coords);
        frame.vertices.push_back(std::move(v));
    }
}

}  // namespace

Rational FrameGraph::total_length() const {
    Rational sum = 0;
    for (const auto& e : edges) sum += e.length;
    return sum;
}

Coordinates FrameGraph::coordinates_at(std::size_t edge, const Rational& r) const {
    return limits(edges.at(edge).coords, r);
}

std::size_t FrameGraph::valence(std::size_t v) const {
    std::size_t d = 0;
    for (const auto& e : edges) d += (e.tail == v) + (e.head == v);
    return d;
}

// ---------------------------------------------------------------------------
// Spectrum

namespace {

std::vector<std::vector<AffineTime>> block_coords(const ABlock& b, std::size_t sources) {
    std::vector<std::vector<AffineTime>> out(sources);
    for (const auto& t : b.terms) out[t.source].push_back(t.tau);
    for (auto& list : out) std::sort(list.begin(), list.end());
    return out;
}

}  // namespace

std::vector<SpectrumPoint> spectrum_boundary(const CanonicalFormA& form) {
    const std::size_t sources = form.spec.control.sigma.size();
    std::vector<SpectrumPoint> out;
    for (std::size_t l = 0; l < form.blocks.size(); ++l) {
        const auto& b = form.blocks[l];
        auto coords = block_coords(b, sources);
        for (bool at_end : {false, true}) {
            const auto& comps = at_end ? b.plus : b.minus;
            const std::size_t points = std::max<std::size_t>(1, comps.size());
            for (std::size_t c = 0; c < points; ++c) {
                SpectrumPoint p;
                p.block = l;
                p.at_end = at_end;
                p.cluster_index = c;
                // every point of a cluster gets the same limit set
                p.coords = limits(coords, at_end ? b.length : Rational(0));
                out.push_back(std::move(p));
            }
        }
    }
    return out;
}

SpectrumPoint spectrum_interior(const CanonicalFormA& form, std::size_t block, const Rational& r) {
    const auto& b = form.blocks.at(block);
    if (r <= 0 || r >= b.length) throw std::out_of_range("not an interior parameter");
    SpectrumPoint p;
    p.block = block;
    p.interior = true;
    p.r = r;
    p.coords = limits(block_coords(b, form.spec.control.sigma.size()), r);
    return p;
}

// ---------------------------------------------------------------------------
// Frames

FrameGraph build_frame_algebraic(const CanonicalFormA& form) {
    const std::size_t sources = form.spec.control.sigma.size();
    FrameGraph frame;
    frame.kind = FrameGraph::Kind::algebraic;
    frame.sources = source_ids(form.spec);
    std::vector<Coordinates> end_coords;
    for (std::size_t l = 0; l < form.blocks.size(); ++l) {
        const auto& b = form.blocks[l];
        FrameEdge e;
        e.id = "s" + std::to_string(l);
        e.length = b.length;
        e.coords = block_coords(b, sources);
        e.origin = l;
        end_coords.push_back(limits(e.coords, Rational(0)));
        end_coords.push_back(limits(e.coords, b.length));
        frame.edges.push_back(std::move(e));
    }
    assemble_vertices(frame, end_coords, nullptr);
    return frame;
}

FrameGraph build_frame_geometric(const GeometricForm& form) {
    const std::size_t sources = form.spec.control.sigma.size();
    const auto& g = form.spec.graph;
    FrameGraph frame;
    frame.kind = FrameGraph::Kind::geometric;
    frame.sources = source_ids(form.spec);
    std::vector<Coordinates> end_coords;
    std::vector<std::set<GraphPoint>> end_points;
    for (std::size_t f = 0; f < form.families.size(); ++f) {
        const auto& fam = form.families[f];
        FrameEdge e;
        e.id = "f" + std::to_string(f);
        e.length = fam.length;
        e.coords.assign(sources, {});
        for (std::size_t s = 0; s < sources; ++s) {
            for (const auto& t : fam.terms[s]) e.coords[s].push_back(t.tau);
            std::sort(e.coords[s].begin(), e.coords[s].end());
        }
        e.origin = f;
        end_coords.push_back(limits(e.coords, Rational(0)));
        end_coords.push_back(limits(e.coords, fam.length));
        for (bool at_end : {false, true}) {
            auto pts = fam.boundary(g, at_end);
            end_points.emplace_back(pts.begin(), pts.end());
        }
        frame.edges.push_back(std::move(e));
    }
    // Ends are glued when their boundary point sets meet.
    std::map<GraphPoint, std::size_t> owner;
    DisjointSet dsu(end_points.size());
    for (std::size_t e = 0; e < end_points.size(); ++e) {
        for (const auto& p : end_points[e]) {
            auto [it, fresh] = owner.emplace(p, e);
            if (!fresh) dsu.unite(it->second, e);
        }
    }
    std::vector<Coordinates> empty(end_coords.size(), Coordinates(sources));
    // Reuse the vertex assembly with gluing driven by the point sets only;
    // coordinates are merged afterwards.
    assemble_vertices(frame, empty, [&](std::size_t a, std::size_t b) { return dsu.find(a) == dsu.find(b); });
    for (auto& v : frame.vertices) {
        for (const auto& end : v.ends) {
            const auto& c = end_coords[2 * end.edge + (end.at_end ? 1 : 0)];
            for (std::size_t s = 0; s < sources; ++s) v.coords[s].insert(v.coords[s].end(), c[s].begin(), c[s].end());
        }
        normalise(v.coords);
    }
    return frame;
}

std::vector<std::string> check_frame(const FrameGraph& frame) {
    std::vector<std::string> problems;
    const std::size_t sources = frame.sources.size();
    std::vector<Coordinates> expected(frame.vertices.size(), Coordinates(sources));
    for (const auto& e : frame.edges) {
        if (e.length <= 0) problems.push_back("edge " + e.id + " has non-positive length");
        bool any = false;
        for (const auto& list : e.coords) {
            for (const auto& t : list) {
                any = true;
                if (t.slope != 1 && t.slope != -1) problems.push_back("edge " + e.id + " has a non-unit slope");
            }
        }
        if (!any) problems.push_back("edge " + e.id + " carries no coordinates");
        for (bool at_end : {false, true}) {
            auto c = limits(e.coords, at_end ? e.length : Rational(0));
            auto& dst = expected.at(at_end ? e.head : e.tail);
            for (std::size_t s = 0; s < sources; ++s) dst[s].insert(dst[s].end(), c[s].begin(), c[s].end());
        }
    }
    std::set<Coordinates> seen;
    for (std::size_t v = 0; v < frame.vertices.size(); ++v) {
        normalise(expected[v]);
        if (expected[v] != frame.vertices[v].coords) {
            problems.push_back("vertex " + frame.vertices[v].id + " coordinates differ from the adjacent limits");
        }
        if (!seen.insert(frame.vertices[v].coords).second) {
            problems.push_back("vertex " + frame.vertices[v].id + " shares its coordinates with another vertex");
        }
    }
    return problems;
}

// ---------------------------------------------------------------------------
// Ordinariness

OrdinaryVerdict check_ordinary(const SourceParametricForm& form) {
    OrdinaryVerdict out;
    for (std::size_t j = 0; j < form.families.size(); ++j) {
        auto nort = nort_partition(form, j);
        auto supp = supp_partition(form, j);
        std::set<std::vector<TermRef>> supp_sets;
        for (const auto& c : supp) supp_sets.insert(c.members);
        for (const auto& c : nort) {
            if (supp_sets.contains(c.members)) continue;
            out.ordinary = false;
            out.family = j;
            out.nort_class = c.members;
            for (const auto& s : supp) {
                if (std::binary_search(s.members.begin(), s.members.end(), c.members.front())) out.supp_class = s.members;
            }
            return out;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Isometry

namespace {

struct RefinedVertex {
    Coordinates coords;
    FramePoint origin;
};

struct RefinedEdge {
    std::size_t edge = 0;  // original edge
    Rational offset;
    Rational length;
    std::size_t tail = 0, head = 0;
    std::vector<std::vector<AffineTime>> coords;  // shifted to start at 0
};

struct Refined {
    std::vector<RefinedVertex> vertices;
    std::vector<RefinedEdge> edges;
};

std::vector<std::vector<AffineTime>> shifted(const std::vector<std::vector<AffineTime>>& coords, const Rational& offset) {
    auto out = coords;
    for (auto& list : out) {
        for (auto& t : list) t = AffineTime{t.slope, t.at(offset)};
        std::sort(list.begin(), list.end());
    }
    return out;
}

std::vector<std::vector<AffineTime>> reversed(const std::vector<std::vector<AffineTime>>& coords, const Rational& len) {
    auto out = coords;
    for (auto& list : out) {
        for (auto& t : list) t = t.reversed(len);
        std::sort(list.begin(), list.end());
    }
    return out;
}

// Parameters in (0, length) of an edge where the coordinates equal `target`.
std::vector<Rational> solve_for(const FrameGraph& f, std::size_t edge, const Coordinates& target) {
    const auto& e = f.edges[edge];
    std::size_t s = 0;
    while (s < target.size() && target[s].empty()) ++s;
    std::vector<Rational> out;
    if (s == target.size()) return out;
    for (const auto& tau : e.coords[s]) {
        for (const auto& x : target[s]) {
            Rational r = tau.slope > 0 ? Rational(x - tau.intercept) : Rational(tau.intercept - x);
            if (r <= 0 || r >= e.length) continue;
            if (f.coordinates_at(edge, r) == target) out.push_back(r);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Refined refine(const FrameGraph& f, const std::vector<Coordinates>& targets) {
    Refined out;
    for (std::size_t v = 0; v < f.vertices.size(); ++v) out.vertices.push_back(RefinedVertex{f.vertices[v].coords, FramePoint{true, v, 0}});
    for (std::size_t e = 0; e < f.edges.size(); ++e) {
        const auto& edge = f.edges[e];
        std::vector<Rational> cuts;
        for (const auto& t : targets) {
            auto rs = solve_for(f, e, t);
            cuts.insert(cuts.end(), rs.begin(), rs.end());
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        std::size_t prev = edge.tail;
        Rational at = 0;
        for (const auto& r : cuts) {
            out.vertices.push_back(RefinedVertex{f.coordinates_at(e, r), FramePoint{false, e, r}});
            const std::size_t v = out.vertices.size() - 1;
            out.edges.push_back(RefinedEdge{e, at, r - at, prev, v, shifted(edge.coords, at)});
            prev = v;
            at = r;
        }
        out.edges.push_back(RefinedEdge{e, at, edge.length - at, prev, edge.head, shifted(edge.coords, at)});
    }
    return out;
}

}  // namespace

std::optional<FrameIsometry> frame_isometry(const FrameGraph& a, const FrameGraph& b, std::string* why) {
    auto fail = [&](std::string reason) -> std::optional<FrameIsometry> {
        if (why) *why = std::move(reason);
        return std::nullopt;
    };
    if (a.sources != b.sources) return fail("frames use different controlled vertices");
    if (a.total_length() != b.total_length()) {
        return fail("total lengths differ: " + to_string(a.total_length()) + " vs " + to_string(b.total_length()));
    }
    std::vector<Coordinates> ta, tb;
    for (const auto& v : a.vertices) ta.push_back(v.coords);
    for (const auto& v : b.vertices) tb.push_back(v.coords);
    auto ra = refine(a, tb);
    auto rb = refine(b, ta);
    if (ra.vertices.size() != rb.vertices.size()) {
        return fail("refined vertex counts differ: " + std::to_string(ra.vertices.size()) + " vs " +
                    std::to_string(rb.vertices.size()));
    }
    if (ra.edges.size() != rb.edges.size()) return fail("refined edge counts differ");

    std::map<Coordinates, std::size_t> index_b;
    for (std::size_t v = 0; v < rb.vertices.size(); ++v) {
        if (!index_b.emplace(rb.vertices[v].coords, v).second) return fail("coordinates do not separate vertices");
    }
    FrameIsometry iso;
    std::vector<std::size_t> vmap(ra.vertices.size());
    std::set<std::size_t> hit;
    for (std::size_t v = 0; v < ra.vertices.size(); ++v) {
        auto it = index_b.find(ra.vertices[v].coords);
        if (it == index_b.end()) return fail("no counterpart for a vertex with coordinates of the first frame");
        if (!hit.insert(it->second).second) return fail("coordinates do not separate vertices");
        vmap[v] = it->second;
        iso.vertices.emplace_back(ra.vertices[v].origin, rb.vertices[it->second].origin);
    }
    std::vector<bool> used(rb.edges.size(), false);
    for (const auto& ea : ra.edges) {
        const std::size_t t = vmap[ea.tail], h = vmap[ea.head];
        bool found = false;
        for (std::size_t j = 0; j < rb.edges.size() && !found; ++j) {
            const auto& eb = rb.edges[j];
            if (used[j] || eb.length != ea.length) continue;
            bool reversed_match = false;
            if (eb.tail == t && eb.head == h && eb.coords == ea.coords) {
                reversed_match = false;
            } else if (eb.tail == h && eb.head == t && reversed(eb.coords, eb.length) == ea.coords) {
                reversed_match = true;
            } else {
                continue;
            }
            used[j] = found = true;
            iso.pieces.push_back(EdgeImage{ea.edge, ea.offset, ea.length, eb.edge, eb.offset, reversed_match});
        }
        if (!found) {
            return fail("edge " + a.edges[ea.edge].id + " piece at offset " + to_string(ea.offset) +
                        " has no counterpart with equal length and coordinates");
        }
    }
    return iso;
}

// ---------------------------------------------------------------------------
// Functional model

namespace {

struct Value {
    bool scalar = true;
    double s = 0;
    Matrix m;
};

class Parser {
public:
    Parser(std::string_view text, const std::function<Matrix(std::string_view)>& lookup, Eigen::Index dim)
        : text_(text), lookup_(lookup), dim_(dim) {}

    Matrix run() {
        Value v = expr();
        skip();
        if (pos_ != text_.size()) error("unexpected '" + std::string(1, text_[pos_]) + "'");
        return as_matrix(v);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    const std::function<Matrix(std::string_view)>& lookup_;
    Eigen::Index dim_;

    [[noreturn]] void error(const std::string& what) const {
        throw ExpressionError(what + " at position " + std::to_string(pos_));
    }
    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    Matrix as_matrix(const Value& v) const { return v.scalar ? Matrix(v.s * Matrix::Identity(dim_, dim_)) : v.m; }

    static Value add(const Value& a, const Value& b, double sign, Eigen::Index dim) {
        if (a.scalar && b.scalar) return Value{true, a.s + sign * b.s, {}};
        Matrix x = a.scalar ? Matrix(a.s * Matrix::Identity(dim, dim)) : a.m;
        Matrix y = b.scalar ? Matrix(b.s * Matrix::Identity(dim, dim)) : b.m;
        return Value{false, 0, x + sign * y};
    }
    static Value mul(const Value& a, const Value& b) {
        if (a.scalar && b.scalar) return Value{true, a.s * b.s, {}};
        if (a.scalar) return Value{false, 0, a.s * b.m};
        if (b.scalar) return Value{false, 0, b.s * a.m};
        return Value{false, 0, a.m * b.m};
    }

    Value expr() {
        Value v = term();
        for (;;) {
            if (eat('+')) {
                v = add(v, term(), 1, dim_);
            } else if (eat('-')) {
                v = add(v, term(), -1, dim_);
            } else {
                return v;
            }
        }
    }
    Value term() {
        Value v = power();
        while (eat('*')) v = mul(v, power());
        return v;
    }
    Value power() {
        Value base = unary();
        if (!eat('^')) return base;
        skip();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) error("expected a non-negative integer exponent");
        int n = std::stoi(std::string(text_.substr(start, pos_ - start)));
        Value out{true, 1, {}};
        for (int i = 0; i < n; ++i) out = mul(out, base);
        return out;
    }
    Value unary() {
        if (eat('-')) return mul(Value{true, -1, {}}, unary());
        return primary();
    }
    Value primary() {
        skip();
        if (eat('(')) {
            Value v = expr();
            if (!eat(')')) error("missing ')'");
            return v;
        }
        if (pos_ >= text_.size()) error("unexpected end of expression");
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) return number();
        if (c == 'E' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '_') {
            pos_ += 2;
            std::size_t start = pos_;
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
            if (start == pos_) error("missing generator name");
            return Value{false, 0, lookup_(text_.substr(start, pos_ - start))};
        }
        error("unexpected '" + std::string(1, c) + "'");
    }
    Value number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        Rational x = parse_rational(text_.substr(start, pos_ - start));
        if (pos_ < text_.size() && text_[pos_] == '/') {
            std::size_t d = ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (d == pos_) error("missing denominator");
            Rational q = parse_rational(text_.substr(d, pos_ - d));
            if (q == 0) error("zero denominator");
            x /= q;
        } else if (pos_ < text_.size() && text_[pos_] == '.') {
            std::size_t d = ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            Rational scale = 1;
            for (std::size_t i = d; i < pos_; ++i) {
                scale *= 10;
                x += Rational(text_[i] - '0') / scale;
            }
        }
        return Value{true, to_double(x), {}};
    }
};

Matrix block_diagonal(const std::vector<Matrix>& parts) {
    Eigen::Index n = 0;
    for (const auto& p : parts) n += p.rows();
    Matrix out = Matrix::Zero(n, n);
    Eigen::Index at = 0;
    for (const auto& p : parts) {
        out.block(at, at, p.rows(), p.rows()) = p;
        at += p.rows();
    }
    return out;
}

using Generators = std::function<std::vector<Matrix>(std::size_t edge, const Rational& r)>;

Matrix evaluate(const FrameGraph& frame, std::string_view expr, const FramePoint& point, const Generators& gens) {
    std::vector<Matrix> at;
    if (point.vertex) {
        const auto& v = frame.vertices.at(point.index);
        std::vector<std::vector<Matrix>> parts;
        for (const auto& end : v.ends) {
            parts.push_back(gens(end.edge, end.at_end ? frame.edges[end.edge].length : Rational(0)));
        }
        for (std::size_t s = 0; s < frame.sources.size(); ++s) {
            std::vector<Matrix> blocks;
            for (const auto& p : parts) blocks.push_back(p[s]);
            at.push_back(block_diagonal(blocks));
        }
    } else {
        const auto& e = frame.edges.at(point.index);
        if (point.r < 0 || point.r > e.length) throw std::out_of_range("parameter outside the edge");
        at = gens(point.index, point.r);
    }
    const Eigen::Index dim = at.empty() ? 0 : at.front().rows();
    std::function<Matrix(std::string_view)> lookup = [&](std::string_view id) -> Matrix {
        for (std::size_t s = 0; s < frame.sources.size(); ++s) {
            if (frame.sources[s] == id) return at[s];
        }
        throw ExpressionError("unknown generator E_" + std::string(id));
    };
    return Parser(expr, lookup, dim).run();
}

}  // namespace

Matrix evaluate_on_frame(const CanonicalFormA& form, const FrameGraph& frame, std::string_view expr,
                         const FramePoint& point) {
    const std::size_t sources = form.spec.control.sigma.size();
    return evaluate(frame, expr, point, [&](std::size_t edge, const Rational& r) {
        return block_generators(form.blocks.at(frame.edges[edge].origin), sources, r);
    });
}

Matrix evaluate_on_frame(const GeometricForm& form, const FrameGraph& frame, std::string_view expr,
                         const FramePoint& point) {
    const std::size_t sources = form.spec.control.sigma.size();
    return evaluate(frame, expr, point, [&](std::size_t edge, const Rational& r) {
        const auto& fam = form.families.at(frame.edges[edge].origin);
        std::vector<Matrix> out;
        for (std::size_t s = 0; s < sources; ++s) out.push_back(to_matrix(block_matrix(fam.terms[s], fam.size(), r)));
        return out;
    });
}

}  // namespace eikonal
