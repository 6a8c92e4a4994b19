#include "eikonal/hydra.hpp"

#include "eikonal/disjoint_set.hpp"
#include "eikonal/log.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace eikonal {

namespace {

// Scattering coefficient for a wave arriving at vertex `w` through `in` and
// leaving through `out`.
Rational kirchhoff_factor(const MetricGraph& g, std::size_t w, const EdgeEnd& in, const EdgeEnd& out) {
    if (g.vertex(w).kind == VertexKind::boundary) return Rational(-1);
    const Rational d = static_cast<long>(g.valence(w));
    if (in == out) return (2 - d) / d;
    return 2 / d;
}

Hop leave_through(const EdgeEnd& end) { return Hop{end.edge, !end.at_head}; }

EdgeEnd arrival_end(const Hop& hop) { return EdgeEnd{hop.edge, hop.forward}; }

Hop first_hop(const MetricGraph& g, std::size_t source) {
    const auto& inc = g.incident(source);
    if (inc.size() != 1) throw std::invalid_argument("controlled vertex must have valence 1");
    return leave_through(inc.front());
}

}  // namespace

std::vector<Ray> trace_rays(const MetricGraph& g, std::size_t source, const Rational& horizon,
                            std::size_t max_rays) {
    std::vector<Ray> rays;
    Ray start{source, {first_hop(g, source)}, Rational(1), Rational(0)};
    std::vector<Ray> stack{start};
    while (!stack.empty()) {
        Ray ray = std::move(stack.back());
        stack.pop_back();
        const Hop& last = ray.hops.back();
        const auto& e = g.edge(last.edge);
        Rational arrival = ray.last_start + e.length;
        if (arrival < horizon) {
            auto in = arrival_end(last);
            auto w = g.end_vertex(in);
            for (const auto& out : g.incident(w)) {
                if (g.vertex(w).kind == VertexKind::boundary && !(out == in)) continue;
                Ray next = ray;
                next.hops.push_back(leave_through(out));
                next.amplitude *= kirchhoff_factor(g, w, in, out);
                next.last_start = arrival;
                stack.push_back(std::move(next));
            }
        }
        rays.push_back(std::move(ray));
        if (rays.size() > max_rays) {
            throw PipelineError("ray enumeration exceeded " + std::to_string(max_rays) + " rays");
        }
    }
    std::sort(rays.begin(), rays.end(), [](const Ray& a, const Ray& b) { return a.hops < b.hops; });
    return rays;
}

std::vector<Front> trace_fronts(const MetricGraph& g, std::size_t source, const Rational& horizon) {
    // Keyed by entry time first, so every contribution to a key is summed
    // before the key is expanded.
    std::map<std::tuple<Rational, Hop>, Rational> pending;
    pending[{Rational(0), first_hop(g, source)}] = 1;
    std::vector<Front> fronts;
    while (!pending.empty()) {
        auto node = pending.extract(pending.begin());
        const auto& [t0, hop] = node.key();
        const Rational& amp = node.mapped();
        if (amp == 0) continue;
        fronts.push_back(Front{source, hop, t0, amp});
        Rational arrival = t0 + g.edge(hop.edge).length;
        if (!(arrival < horizon)) continue;
        auto in = arrival_end(hop);
        auto w = g.end_vertex(in);
        for (const auto& out : g.incident(w)) {
            if (g.vertex(w).kind == VertexKind::boundary && !(out == in)) continue;
            pending[{arrival, leave_through(out)}] += amp * kirchhoff_factor(g, w, in, out);
        }
    }
    return fronts;
}

Interval ArrivalFunction::time_range(const Interval& offsets) const {
    Rational a = time_at(offsets.lo);
    Rational b = time_at(offsets.hi);
    return a < b ? Interval{a, b} : Interval{b, a};
}

namespace {

ArrivalFunction arrival_for(const MetricGraph& g, std::size_t source, const Hop& hop, const Rational& t0,
                            const Rational& amplitude, const Rational& horizon) {
    const auto& e = g.edge(hop.edge);
    Rational reach = horizon - t0;
    ArrivalFunction a;
    a.source = source;
    a.edge = hop.edge;
    a.amplitude = amplitude;
    if (hop.forward) {
        a.slope = 1;
        a.intercept = t0;
        a.valid = {Rational(0), min(e.length, reach)};
    } else {
        a.slope = -1;
        a.intercept = t0 + e.length;
        a.valid = {max(Rational(0), e.length - reach), e.length};
    }
    return a;
}

std::vector<ArrivalFunction> merge_arrivals(std::vector<ArrivalFunction> raw) {
    auto key = [](const ArrivalFunction& a) { return std::tie(a.source, a.edge, a.slope, a.intercept); };
    std::sort(raw.begin(), raw.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
    std::vector<ArrivalFunction> out;
    for (auto& a : raw) {
        if (!out.empty() && key(out.back()) == key(a)) {
            out.back().amplitude += a.amplitude;
        } else {
            out.push_back(std::move(a));
        }
    }
    std::erase_if(out, [](const ArrivalFunction& a) { return a.amplitude == 0; });
    return out;
}

}  // namespace

std::vector<ArrivalFunction> arrival_table(const MetricGraph& g, std::span<const Front> fronts,
                                           const Rational& horizon) {
    std::vector<ArrivalFunction> raw;
    raw.reserve(fronts.size());
    for (const auto& f : fronts) {
        if (f.entry_time < horizon) raw.push_back(arrival_for(g, f.source, f.hop, f.entry_time, f.amplitude, horizon));
    }
    return merge_arrivals(std::move(raw));
}

std::vector<ArrivalFunction> arrival_table(const MetricGraph& g, std::span<const Ray> rays,
                                           const Rational& horizon) {
    std::vector<ArrivalFunction> raw;
    raw.reserve(rays.size());
    for (const auto& r : rays) {
        if (r.last_start < horizon) {
            raw.push_back(arrival_for(g, r.source, r.hops.back(), r.last_start, r.amplitude, horizon));
        }
    }
    return merge_arrivals(std::move(raw));
}

std::vector<GraphPoint> Family::boundary(const MetricGraph& g, bool at_end) const {
    std::vector<GraphPoint> out;
    out.reserve(cells.size());
    for (const auto& c : cells) out.push_back(c.point_at(g, at_end ? length : Rational(0)));
    return out;
}

// ---------------------------------------------------------------------------
// Partition into cells and families

namespace {

struct AtomicCell {
    std::size_t edge;
    Interval span;
    std::vector<std::size_t> arrivals;  // indices into the arrival list
};

class CutSet {
public:
    explicit CutSet(const MetricGraph& g) : cuts_(g.edges().size()) {
        for (std::size_t e = 0; e < g.edges().size(); ++e) {
            cuts_[e].insert(Rational(0));
            cuts_[e].insert(g.edge(e).length);
        }
    }
    bool add(std::size_t edge, const Rational& s) { return cuts_[edge].insert(s).second; }
    const std::set<Rational>& on(std::size_t edge) const { return cuts_[edge]; }

private:
    std::vector<std::set<Rational>> cuts_;
};

std::vector<AtomicCell> atomic_cells(const MetricGraph& g, const CutSet& cuts,
                                     std::span<const ArrivalFunction> arrivals,
                                     const std::vector<std::vector<std::size_t>>& by_edge) {
    std::vector<AtomicCell> cells;
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        const auto& cs = cuts.on(e);
        for (auto it = cs.begin(); std::next(it) != cs.end(); ++it) {
            Interval span{*it, *std::next(it)};
            AtomicCell cell{e, span, {}};
            for (auto ai : by_edge[e]) {
                const auto& a = arrivals[ai];
                if (a.valid.lo <= span.lo && span.hi <= a.valid.hi) cell.arrivals.push_back(ai);
            }
            if (!cell.arrivals.empty()) cells.push_back(std::move(cell));
        }
    }
    return cells;
}

// Closes the cut set under "every point an arrival reaches at a time that
// is critical for its source is a cut", where the critical times of a source
// are the times its arrivals take at cuts. Worklist over new cuts and times.
class Saturator {
public:
    Saturator(CutSet& cuts, std::span<const ArrivalFunction> arrivals, std::size_t edges)
        : cuts_(cuts), arrivals_(arrivals), by_edge_(edges) {
        for (std::size_t i = 0; i < arrivals.size(); ++i) {
            by_edge_[arrivals[i].edge].push_back(i);
            by_source_[arrivals[i].source].push_back(i);
        }
        for (std::size_t e = 0; e < edges; ++e) {
            for (const auto& c : cuts.on(e)) cut_queue_.emplace_back(e, c);
        }
    }

    bool add(std::size_t edge, const Rational& s) {
        if (!cuts_.add(edge, s)) return false;
        cut_queue_.emplace_back(edge, s);
        return true;
    }

    void run() {
        while (!cut_queue_.empty() || !time_queue_.empty()) {
            while (!cut_queue_.empty()) {
                auto [e, c] = std::move(cut_queue_.back());
                cut_queue_.pop_back();
                for (auto ai : by_edge_[e]) {
                    const auto& a = arrivals_[ai];
                    if (!a.valid.contains(c)) continue;
                    Rational t = a.time_at(c);
                    if (critical_[a.source].insert(t).second) time_queue_.emplace_back(a.source, t);
                }
            }
            while (!time_queue_.empty()) {
                auto [src, t] = std::move(time_queue_.back());
                time_queue_.pop_back();
                for (auto ai : by_source_[src]) {
                    const auto& a = arrivals_[ai];
                    if (a.time_range(a.valid).contains_open(t)) add(a.edge, a.offset_at(t));
                }
            }
        }
    }

private:
    CutSet& cuts_;
    std::span<const ArrivalFunction> arrivals_;
    std::vector<std::vector<std::size_t>> by_edge_;
    std::map<std::size_t, std::vector<std::size_t>> by_source_;
    std::map<std::size_t, std::set<Rational>> critical_;
    std::vector<std::pair<std::size_t, Rational>> cut_queue_;
    std::vector<std::pair<std::size_t, Rational>> time_queue_;
};

}  // namespace

Partition build_cells_and_families(const MetricGraph& g, const ControlConfig& control,
                                   std::span<const ArrivalFunction> arrivals,
                                   std::span<const GraphPoint> extra_cuts) {
    std::vector<std::vector<std::size_t>> by_edge(g.edges().size());
    for (std::size_t i = 0; i < arrivals.size(); ++i) by_edge[arrivals[i].edge].push_back(i);

    CutSet cuts(g);
    for (const auto& a : arrivals) {
        cuts.add(a.edge, a.valid.lo);
        cuts.add(a.edge, a.valid.hi);
    }
    for (const auto& p : extra_cuts) {
        if (!p.is_vertex()) cuts.add(p.index, p.offset);
    }
    // Crossings of arrivals from the same source fix the time ordering.
    for (std::size_t e = 0; e < by_edge.size(); ++e) {
        const auto& ids = by_edge[e];
        for (std::size_t i = 0; i < ids.size(); ++i) {
            for (std::size_t j = i + 1; j < ids.size(); ++j) {
                const auto& a = arrivals[ids[i]];
                const auto& b = arrivals[ids[j]];
                if (a.source != b.source || a.slope == b.slope) continue;
                const auto& up = a.slope > 0 ? a : b;
                const auto& down = a.slope > 0 ? b : a;
                Rational s = (down.intercept - up.intercept) / 2;
                if (a.valid.contains_open(s) && b.valid.contains_open(s)) cuts.add(e, s);
            }
        }
    }

    Saturator saturator(cuts, arrivals, g.edges().size());
    constexpr std::size_t max_rounds = 10000;
    for (std::size_t round = 0;; ++round) {
        if (round > max_rounds) throw PipelineError("breakpoint refinement did not converge");
        saturator.run();

        auto atoms = atomic_cells(g, cuts, arrivals, by_edge);
        log::debug("partition round ", round, ": ", atoms.size(), " atomic cells");
        // Cells carrying an arrival of the same source over the same time
        // range are swept by one determination set.
        std::map<std::tuple<std::size_t, Rational, Rational>, std::vector<std::pair<std::size_t, int>>> coupling;
        for (std::size_t c = 0; c < atoms.size(); ++c) {
            for (auto ai : atoms[c].arrivals) {
                const auto& a = arrivals[ai];
                auto range = a.time_range(atoms[c].span);
                coupling[{a.source, range.lo, range.hi}].emplace_back(c, a.slope);
            }
        }
        ParityDisjointSet dsu(atoms.size());
        std::vector<std::size_t> conflicted;
        for (const auto& [key, members] : coupling) {
            const auto& [c0, s0] = members.front();
            for (const auto& [c, s] : members) {
                if (atoms[c].span.length() != atoms[c0].span.length()) {
                    throw PipelineError("coupled cells differ in length");
                }
                if (!dsu.unite(c0, c, s != s0)) {
                    conflicted.push_back(c0);
                    conflicted.push_back(c);
                }
            }
        }
        if (!conflicted.empty()) {
            // A determination set meets a cell twice; split at midpoints.
            bool changed = false;
            for (auto c : conflicted) {
                changed |= saturator.add(atoms[c].edge, (atoms[c].span.lo + atoms[c].span.hi) / 2);
            }
            if (!changed) throw PipelineError("cannot orient cells coherently");
            continue;
        }

        std::map<std::size_t, Family> by_root;
        for (std::size_t c = 0; c < atoms.size(); ++c) {
            auto [root, parity] = dsu.find(c);
            auto& fam = by_root[root];
            fam.cells.push_back(Cell{atoms[c].edge, atoms[c].span, parity});
            fam.length = atoms[c].span.length();
        }
        Partition out;
        for (auto& [root, fam] : by_root) {
            std::sort(fam.cells.begin(), fam.cells.end(), [](const Cell& a, const Cell& b) {
                return std::tie(a.edge, a.span.lo) < std::tie(b.edge, b.span.lo);
            });
            if (fam.cells.front().reversed) fam.flip();
            out.families.push_back(std::move(fam));
        }
        std::sort(out.families.begin(), out.families.end(), [](const Family& a, const Family& b) {
            const auto& x = a.cells.front();
            const auto& y = b.cells.front();
            return std::tie(x.edge, x.span.lo) < std::tie(y.edge, y.span.lo);
        });

        std::set<GraphPoint> theta;
        for (const auto& atom : atoms) {
            theta.insert(GraphPoint::on_edge(g, atom.edge, atom.span.lo));
            theta.insert(GraphPoint::on_edge(g, atom.edge, atom.span.hi));
        }
        for (auto v : metric_ball(g, control.sigma, control.horizon).vertices) theta.insert(GraphPoint::at_vertex(v));
        out.critical.assign(theta.begin(), theta.end());
        return out;
    }
}

}  // namespace eikonal
