#include "eikonal/canon_geometric.hpp"

#include "eikonal/disjoint_set.hpp"
#include "eikonal/log.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace eikonal {

std::vector<SuppClass> supp_partition(const SourceParametricForm& form, std::size_t family) {
    const auto& f = form.families.at(family);
    std::vector<TermRef> refs;
    for (std::size_t s = 0; s < f.terms.size(); ++s) {
        for (std::size_t i = 0; i < f.terms[s].size(); ++i) refs.push_back(TermRef{s, i});
    }
    const std::size_t m = f.family.cells.size();
    DisjointSet dsu(refs.size());
    std::vector<std::size_t> first_at(m, refs.size());
    for (std::size_t i = 0; i < refs.size(); ++i) {
        for (auto k : f.terms[refs[i].source][refs[i].term].projector.support()) {
            if (first_at[k] == refs.size()) {
                first_at[k] = i;
            } else {
                dsu.unite(first_at[k], i);
            }
        }
    }
    std::vector<SuppClass> out;
    for (const auto& cls : dsu.classes()) {
        SuppClass sc;
        sc.family = family;
        std::set<std::size_t> support;
        for (auto i : cls) {
            sc.members.push_back(refs[i]);
            for (auto k : f.terms[refs[i].source][refs[i].term].projector.support()) support.insert(k);
        }
        std::sort(sc.members.begin(), sc.members.end());
        sc.support.assign(support.begin(), support.end());
        out.push_back(std::move(sc));
    }
    return out;
}

// ---------------------------------------------------------------------------
// GFamily

namespace {

GraphPoint piece_point(const MetricGraph& g, const CellPiece& p, const Rational& local) {
    return GraphPoint::on_edge(g, p.edge, p.reversed ? Rational(p.span.hi - local) : Rational(p.span.lo + local));
}

}  // namespace

GraphPoint GFamily::point_at(const MetricGraph& g, std::size_t cell, const Rational& r) const {
    Rational rest = r;
    const auto& pieces = cells.at(cell);
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (rest <= pieces[i].length() || i + 1 == pieces.size()) return piece_point(g, pieces[i], rest);
        rest -= pieces[i].length();
    }
    throw std::out_of_range("empty cell");
}

std::vector<GraphPoint> GFamily::boundary(const MetricGraph& g, bool at_end) const {
    std::vector<GraphPoint> out;
    for (std::size_t k = 0; k < cells.size(); ++k) out.push_back(point_at(g, k, at_end ? length : Rational(0)));
    return out;
}

void GFamily::flip() {
    for (auto& cell : cells) {
        std::reverse(cell.begin(), cell.end());
        for (auto& p : cell) p.reversed = !p.reversed;
    }
    for (auto& list : terms) {
        for (auto& t : list) t.tau = t.tau.reversed(length);
    }
    std::reverse(origin.begin(), origin.end());
}

std::vector<SubFamily> split_families(const SourceParametricForm& form) {
    std::vector<SubFamily> out;
    for (std::size_t j = 0; j < form.families.size(); ++j) {
        const auto& f = form.families[j];
        for (const auto& sc : supp_partition(form, j)) {
            SubFamily sub;
            sub.family = j;
            sub.cell_indices = sc.support;
            sub.data.length = f.family.length;
            for (auto k : sc.support) {
                const auto& c = f.family.cells[k];
                sub.data.cells.push_back({CellPiece{c.edge, c.span, c.reversed}});
            }
            sub.data.terms.assign(f.terms.size(), {});
            for (const auto& ref : sc.members) {
                const auto& t = f.terms[ref.source][ref.term];
                RationalVector beta;
                for (auto k : sc.support) beta.push_back(t.projector.beta[k]);
                // The restriction carries the whole direction: supports lie
                // inside the class by construction.
                sub.data.terms[ref.source].push_back(EikonalTerm{t.tau, ProjectorVec{std::move(beta), t.projector.norm2}});
            }
            sub.data.origin = {out.size()};
            out.push_back(std::move(sub));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Connections

namespace {

bool parallel(const RationalVector& a, const RationalVector& b) {
    if (a.size() != b.size()) return false;
    std::size_t k = 0;
    while (k < a.size() && a[k] == 0) ++k;
    if (k == a.size() || b[k] == 0) return false;
    Rational lambda = b[k] / a[k];
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (b[i] != lambda * a[i]) return false;
    }
    return true;
}

// a read with flip fa ends at the junction; b read with flip fb starts there.
std::optional<std::vector<std::size_t>> connect_oriented(const MetricGraph& g, std::size_t sources, const GFamily& a,
                                                         bool fa, const GFamily& b, bool fb, std::string* ambiguity) {
    const std::size_t m = a.size();
    if (b.size() != m) return std::nullopt;
    auto pa = a.boundary(g, !fa);
    auto pb = b.boundary(g, fb);
    auto sa = pa, sb = pb;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return std::nullopt;
    if (std::adjacent_find(sa.begin(), sa.end()) != sa.end()) {
        if (ambiguity) *ambiguity = "boundary point shared by several cells: " + describe(g, *std::adjacent_find(sa.begin(), sa.end()));
        return std::nullopt;
    }
    std::vector<std::size_t> bij(m);
    for (std::size_t k = 0; k < m; ++k) bij[k] = static_cast<std::size_t>(std::find(pa.begin(), pa.end(), pb[k]) - pa.begin());

    const Rational ja = fa ? Rational(0) : a.length;
    const Rational jb = fb ? b.length : Rational(0);
    for (std::size_t s = 0; s < sources; ++s) {
        const auto& ta = a.terms[s];
        const auto& tb = b.terms[s];
        if (ta.size() != tb.size()) return std::nullopt;
        std::vector<bool> used(ta.size(), false);
        for (const auto& t : tb) {
            RationalVector moved(m);
            for (std::size_t k = 0; k < m; ++k) moved[bij[k]] = t.projector.beta[k];
            const int slope_b = fb ? -t.tau.slope : t.tau.slope;
            bool found = false;
            for (std::size_t i = 0; i < ta.size() && !found; ++i) {
                const int slope_a = fa ? -ta[i].tau.slope : ta[i].tau.slope;
                if (used[i] || slope_a != slope_b || ta[i].tau.at(ja) != t.tau.at(jb)) continue;
                if (!parallel(ta[i].projector.beta, moved)) continue;
                used[i] = found = true;
            }
            if (!found) return std::nullopt;
        }
    }
    return bij;
}

}  // namespace

std::optional<Connection> family_connectable(const MetricGraph& g, std::size_t sources, const GFamily& a,
                                             const GFamily& b, std::string* ambiguity) {
    if (&a == &b) return std::nullopt;
    for (bool fa : {false, true}) {
        for (bool fb : {false, true}) {
            if (auto bij = connect_oriented(g, sources, a, fa, b, fb, ambiguity)) return Connection{fa, fb, *bij};
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Merging

namespace {

std::vector<Rational> sorted_values(const GFamily& f, const Rational& r) {
    std::vector<Rational> v;
    for (const auto& list : f.terms) {
        for (const auto& t : list) v.push_back(t.tau.at(r));
    }
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

GeometricForm merge_families(const SourceParametricForm& form, std::vector<SubFamily> subs) {
    const auto& g = form.spec.graph;
    const std::size_t sources = form.spec.control.sigma.size();
    const std::size_t n = subs.size();
    GeometricForm out;
    out.spec = form.spec;

    // End e = 2 * subfamily + side (0: r = 0, 1: r = length), bucketed by
    // boundary point set so only candidates with equal sets are compared.
    std::map<std::vector<GraphPoint>, std::vector<std::size_t>> by_points;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t side = 0; side < 2; ++side) {
            auto pts = subs[i].data.boundary(g, side == 1);
            std::sort(pts.begin(), pts.end());
            by_points[pts].push_back(2 * i + side);
        }
    }
    struct Link {
        std::size_t other;
        std::vector<std::size_t> bijection;  // other's cell -> this family's cell, with this read first
    };
    std::vector<std::vector<Link>> links(2 * n);
    for (const auto& [pts, ends] : by_points) {
        for (std::size_t x = 0; x < ends.size(); ++x) {
            for (std::size_t y = 0; y < ends.size(); ++y) {
                const auto ea = ends[x], eb = ends[y];
                if (ea / 2 == eb / 2) continue;
                std::string amb;
                auto bij = connect_oriented(g, sources, subs[ea / 2].data, ea % 2 == 0, subs[eb / 2].data, eb % 2 == 1, &amb);
                if (!amb.empty() && x < y) out.diagnostics.push_back("ambiguous connection: " + amb);
                if (bij) links[ea].push_back(Link{eb, *bij});
            }
        }
    }
    for (std::size_t e = 0; e < 2 * n; ++e) {
        if (links[e].size() > 1) {
            throw PipelineError("chain structure inconsistent: subfamily " + std::to_string(e / 2) + " connects to " +
                                std::to_string(links[e].size()) + " partners at one end");
        }
    }

    std::set<GraphPoint> junctions;
    std::vector<bool> used(n, false);
    auto walk = [&](std::size_t start, std::size_t free_side) {
        GFamily chain = subs[start].data;
        if (free_side == 1) chain.flip();
        used[start] = true;
        std::size_t exit = 2 * start + (1 - free_side);
        while (!links[exit].empty()) {
            const auto& link = links[exit].front();
            const std::size_t b = link.other / 2;
            if (used[b]) throw PipelineError("cyclic chain of connectable families");
            used[b] = true;
            GFamily next = subs[b].data;
            if (link.other % 2 == 1) next.flip();
            // The bijection was computed with `exit`'s family read first in its
            // own orientation; cells of the chain so far keep that numbering.
            for (std::size_t k = 0; k < next.size(); ++k) {
                auto& cell = chain.cells[link.bijection[k]];
                junctions.insert(chain.point_at(g, link.bijection[k], chain.length));
                cell.insert(cell.end(), next.cells[k].begin(), next.cells[k].end());
            }
            chain.length += next.length;
            chain.origin.push_back(b);
            exit = 2 * b + (1 - link.other % 2);
        }
        if (sorted_values(chain, chain.length) < sorted_values(chain, Rational(0))) chain.flip();
        out.families.push_back(std::move(chain));
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        if (links[2 * i].empty()) {
            walk(i, 0);
        } else if (links[2 * i + 1].empty()) {
            walk(i, 1);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!used[i]) throw PipelineError("cyclic chain of connectable families");
    }
    for (const auto& p : form.critical) {
        if (!junctions.contains(p)) out.critical.push_back(p);
    }
    log::info("geometric form: ", n, " subfamilies merged into ", out.families.size());
    return out;
}

GeometricForm geometric_form(const SourceParametricForm& form) { return merge_families(form, split_families(form)); }

std::vector<std::string> check_geometric(const GeometricForm& form) {
    std::vector<std::string> problems;
    const auto& g = form.spec.graph;
    const std::size_t sources = form.spec.control.sigma.size();
    std::vector<std::vector<Interval>> pieces(g.edges().size());
    std::set<GraphPoint> inner;
    for (std::size_t f = 0; f < form.families.size(); ++f) {
        const auto& fam = form.families[f];
        for (const auto& cell : fam.cells) {
            Rational len = 0;
            for (std::size_t i = 0; i < cell.size(); ++i) {
                len += cell[i].length();
                pieces[cell[i].edge].push_back(cell[i].span);
                if (i > 0) inner.insert(piece_point(g, cell[i], Rational(0)));
            }
            if (len != fam.length) problems.push_back("cell length differs from family length");
        }
        for (std::size_t s = 0; s < sources; ++s) {
            for (const auto& t : fam.terms[s]) {
                if (t.projector.beta.size() != fam.size()) problems.push_back("term leaves its family");
            }
        }
    }
    // Open pieces are disjoint and, with the critical set, fill the ball.
    auto ball = metric_ball(g, form.spec.control.sigma, form.spec.control.horizon);
    std::vector<BallSegment> covered;
    for (std::size_t e = 0; e < pieces.size(); ++e) {
        auto list = pieces[e];
        std::sort(list.begin(), list.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        for (std::size_t i = 1; i < list.size(); ++i) {
            if (list[i].lo < list[i - 1].hi) problems.push_back("overlapping cells on an edge");
        }
        for (const auto& iv : interval_union(list)) covered.push_back(BallSegment{e, iv});
    }
    if (covered != ball.segments) problems.push_back("cells do not cover the wave-filled domain");
    for (const auto& p : form.critical) {
        if (inner.contains(p)) problems.push_back("critical point inside a merged cell");
        if (!ball.contains(g, p)) problems.push_back("critical point outside the domain");
    }
    return problems;
}

}  // namespace eikonal
