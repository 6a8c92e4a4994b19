// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "support.hpp"

#include "eikonal/frames.hpp"
#include "eikonal/oracle.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>

using namespace eikonal;
using testing_support::load;
using testing_support::R;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::string detail;
    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
    void require(bool ok, const std::string& why) {
        if (!ok) fail(why);
    }
};

struct Run {
    GraphSpec spec;
    SourceParametricForm source;
    CanonicalFormA a;
    GeometricForm g;
    FrameGraph fa;
    FrameGraph fg;
};

Run run(const GraphSpec& spec, const AssembleOptions& opt = {}) {
    Run r;
    r.spec = spec;
    r.source = assemble_source_form(spec, opt);
    r.a = merge_chains(r.source);
    r.g = geometric_form(r.source);
    r.fa = build_frame_algebraic(r.a);
    r.fg = build_frame_geometric(r.g);
    return r;
}

Coordinates single(std::initializer_list<const char*> values) {
    Coordinates c(1);
    for (auto v : values) c[0].push_back(R(v));
    return c;
}

// Random suite shared by criteria 4 to 7.
struct Suite {
    std::vector<GraphSpec> trees;
    std::vector<GraphSpec> unicyclic;
    std::vector<Run> tree_runs;
    std::vector<Run> cyclic_runs;
};

Suite& suite() {
    static Suite s = [] {
        Suite out;
        std::mt19937_64 rng(20261016);
        for (int i = 0; i < 20; ++i) out.trees.push_back(testing_support::random_tree(rng, 8));
        for (int i = 0; i < 10; ++i) out.unicyclic.push_back(testing_support::random_unicyclic(rng, 6));
        for (const auto& t : out.trees) out.tree_runs.push_back(run(t));
        for (const auto& u : out.unicyclic) out.cyclic_runs.push_back(run(u));
        return out;
    }();
    return s;
}

Outcome interval_exactness() {
    Outcome o;
    auto t0 = Clock::now();
    auto r = run(load("interval.graph"));
    const auto& f = r.source.families;
    o.require(f.size() == 1, "expected one family");
    if (f.size() == 1) {
        o.require(f[0].terms.size() == 1 && f[0].terms[0].size() == 1, "expected one term");
        if (o.pass) {
            const auto& t = f[0].terms[0][0];
            o.require(t.tau == AffineTime{1, Rational(1)}, "tau is not 1 + r");
            o.require(t.projector.beta == RationalVector{Rational(1)}, "P is not [1]");
        }
    }
    for (const auto* fr : {&r.fa, &r.fg}) {
        o.require(fr->edges.size() == 1 && fr->vertices.size() == 2, "frame is not a single edge");
        if (!o.pass) break;
        const auto& e = fr->edges[0];
        o.require(e.length == 1, "frame edge length is not 1");
        o.require(fr->vertices[e.tail].coords == single({"1"}) && fr->vertices[e.head].coords == single({"2"}),
                  "endpoint coordinates are not {1} and {2}");
    }
    o.require(seconds_since(t0) < 1.0, "slower than 1 s");
    return o;
}

Outcome star_end_to_end() {
    Outcome o;
    auto t0 = Clock::now();
    auto r = run(load("star3.graph"));
    const auto& f = r.source.families;
    o.require(f.size() == 2, "expected two families");
    if (!o.pass) return o;
    o.require(f[0].family.cells.size() == 1 && f[1].family.cells.size() == 3, "family sizes are not 1 and 3");
    o.require(f[0].terms[0] == std::vector<EikonalTerm>{EikonalTerm{AffineTime{1, Rational(1)}, ProjectorVec::from({Rational(1)})}},
              "family 0 terms differ");
    std::vector<EikonalTerm> expect{
        EikonalTerm{AffineTime{-1, Rational(2)}, ProjectorVec::from({Rational(1), Rational(0), Rational(0)})},
        EikonalTerm{AffineTime{1, Rational(2)}, ProjectorVec::from({Rational(0), Rational(1), Rational(1)})}};
    o.require(f[1].terms[0] == expect, "family 1 terms differ");

    o.require(r.a.blocks.size() == 1, "canonical form A is not one block");
    if (r.a.blocks.size() == 1) {
        o.require(r.a.blocks[0].length == R("3/2") && r.a.blocks[0].kappa == 1, "block is not (3/2, 1)");
    }
    o.require(r.fg.edges.size() == 2 && r.fg.vertices.size() == 3, "G-frame is not two edges");
    if (r.fg.edges.size() == 2 && r.fg.vertices.size() == 3) {
        std::vector<Rational> lengths{r.fg.edges[0].length, r.fg.edges[1].length};
        std::sort(lengths.begin(), lengths.end());
        o.require(lengths == std::vector<Rational>{R("1/2"), Rational(1)}, "G-frame lengths are not 1 and 1/2");
        bool middle = false;
        for (std::size_t v = 0; v < 3; ++v) middle |= r.fg.valence(v) == 2 && r.fg.vertices[v].coords == single({"2"});
        o.require(middle, "no valence-2 vertex with coordinates {2}");
    }
    o.require(check_ordinary(r.source).ordinary, "not ordinary");
    std::string why;
    o.require(frame_isometry(r.fa, r.fg, &why).has_value(), "frames not isometric: " + why);
    o.require(seconds_since(t0) < 1.0, "slower than 1 s");
    return o;
}

Outcome oracle_agreement() {
    Outcome o;
    auto t0 = Clock::now();
    std::ostringstream summary;
    for (auto [name, h] : {std::pair{"interval.graph", "1/200"}, std::pair{"star3.graph", "1/400"}}) {
        auto form = assemble_source_form(load(name));
        auto fine = compare(form, R(h), 2);
        auto coarse = compare(form, R(h) * 2, 2);
        const double e = fine.max_eigenvalue_error(), c = coarse.max_eigenvalue_error();
        summary << name << " h=" << h << " err=" << e << " ratio=" << e / c << " angle=" << fine.max_angle() << "; ";
        o.require(e < 2e-2, std::string(name) + ": eigenvalue error above 2e-2");
        o.require(e <= 0.7 * c, std::string(name) + ": error does not shrink by 0.7 under halving");
    }
    const double t = seconds_since(t0);
    o.require(t < 120, "slower than 2 min");
    if (o.pass) o.detail = summary.str() + "time " + std::to_string(t) + " s";
    return o;
}

Outcome spectrum_filling() {
    Outcome o;
    auto& s = suite();
    for (std::size_t i = 0; i < s.trees.size(); ++i) {
        const auto& spec = s.trees[i];
        for (std::size_t src = 0; src < spec.control.sigma.size(); ++src) {
            auto cover = tau_cover(s.tree_runs[i].source, src);
            o.require(cover.size() == 1 && cover[0] == Interval{Rational(1), spec.control.horizon + 1},
                      "tree " + std::to_string(i) + ": tau union is not [1, T + 1]");
        }
    }
    if (o.pass) o.detail = std::to_string(s.trees.size()) + " trees";
    return o;
}

Outcome relabel_invariance() {
    Outcome o;
    auto& s = suite();
    std::mt19937_64 rng(7);
    for (std::size_t i = 0; i < s.trees.size(); ++i) {
        std::map<std::string, std::string> renamed;
        auto flipped = run(testing_support::relabel_and_flip(s.trees[i], rng, &renamed));
        auto moved = testing_support::rename_sources(s.tree_runs[i].fa, renamed, flipped.fa.sources);
        std::string why;
        o.require(frame_isometry(moved, flipped.fa, &why).has_value(), "tree " + std::to_string(i) + ": " + why);
    }
    return o;
}

Outcome ordinary_implies_isometry() {
    Outcome o;
    auto& s = suite();
    std::size_t ordinary = 0, total = 0;
    auto visit = [&](const std::vector<Run>& runs, const char* what) {
        for (std::size_t i = 0; i < runs.size(); ++i) {
            ++total;
            if (!check_ordinary(runs[i].source).ordinary) continue;
            ++ordinary;
            std::string why;
            o.require(frame_isometry(runs[i].fa, runs[i].fg, &why).has_value(),
                      std::string(what) + " " + std::to_string(i) + " is ordinary but " + why);
        }
    };
    visit(s.tree_runs, "tree");
    visit(s.cyclic_runs, "unicyclic");
    if (o.pass) o.detail = std::to_string(ordinary) + " of " + std::to_string(total) + " graphs ordinary";
    return o;
}

Outcome algebraic_structure() {
    Outcome o;
    auto& s = suite();
    std::vector<const Run*> runs;
    for (const auto& r : s.tree_runs) runs.push_back(&r);
    for (const auto& r : s.cyclic_runs) runs.push_back(&r);
    auto star = run(load("star3.graph"));
    runs.push_back(&star);
    std::size_t classes = 0, exact_checked = 0;
    for (std::size_t g = 0; g < runs.size(); ++g) {
        const auto& form = runs[g]->source;
        const std::string where = "graph " + std::to_string(g);
        for (std::size_t j = 0; j < form.families.size(); ++j) {
            for (const auto& nc : nort_partition(form, j)) {
                ++classes;
                o.require(nc.closure_dim == nc.kappa * nc.kappa, where + ": float closure dimension is not kappa^2");
                if (nc.exact_closure_dim) {
                    ++exact_checked;
                    o.require(nc.exact_closure_dim == nc.kappa * nc.kappa, where + ": exact closure dimension is not kappa^2");
                }
            }
            const auto& f = form.families[j];
            for (const auto& terms : f.terms) {
                for (std::size_t a = 0; a < terms.size(); ++a) {
                    for (std::size_t b = a + 1; b < terms.size(); ++b) {
                        o.require(dot(terms[a].projector.beta, terms[b].projector.beta) == 0, where + ": projectors not orthogonal");
                        o.require(endpoint_only_overlap(terms[a].tau.range(f.family.length), terms[b].tau.range(f.family.length)),
                                  where + ": tau ranges overlap");
                    }
                }
            }
        }
    }
    if (o.pass) {
        o.detail = std::to_string(classes) + " nort classes, " + std::to_string(exact_checked) + " with exact closure";
    }
    return o;
}

bool same_blocks(const CanonicalFormA& a, const CanonicalFormA& b) {
    if (a.blocks.size() != b.blocks.size()) return false;
    for (std::size_t k = 0; k < a.blocks.size(); ++k) {
        const auto& x = a.blocks[k];
        const auto& y = b.blocks[k];
        if (x.length != y.length || x.kappa != y.kappa || x.minus != y.minus || x.plus != y.plus) return false;
        if (x.terms.size() != y.terms.size()) return false;
        for (std::size_t t = 0; t < x.terms.size(); ++t) {
            if (x.terms[t].source != y.terms[t].source || !(x.terms[t].tau == y.terms[t].tau)) return false;
            if ((x.terms[t].projector - y.terms[t].projector).norm() > 1e-12) return false;
        }
    }
    return true;
}

Outcome self_healing() {
    Outcome o;
    auto spec = load("star3.graph");
    auto base = run(spec);
    std::size_t tried = 0;
    for (const auto& f : base.source.families) {
        for (const auto& cell : f.family.cells) {
            for (const char* frac : {"1/2", "1/3", "5/7"}) {
                AssembleOptions opt;
                opt.extra_cuts = {GraphPoint::on_edge(spec.graph, cell.edge, cell.span.lo + cell.length() * R(frac))};
                auto cut = run(spec, opt);
                ++tried;
                o.require(cut.source.families.size() > base.source.families.size(), "cut was not applied");
                o.require(same_blocks(cut.a, base.a), "canonical form A changed");
                std::string why;
                o.require(frame_isometry(cut.fa, base.fa, &why).has_value(), "A-frames differ: " + why);
                o.require(frame_isometry(cut.fg, base.fg, &why).has_value(), "G-frames differ: " + why);
            }
        }
    }
    if (o.pass) o.detail = std::to_string(tried) + " cuts";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"interval exactness", interval_exactness},
        {"3-star end to end", star_end_to_end},
        {"oracle agreement", oracle_agreement},
        {"spectrum filling", spectrum_filling},
        {"relabel and flip invariance", relabel_invariance},
        {"ordinary implies isometric frames", ordinary_implies_isometry},
        {"algebraic structure", algebraic_structure},
        {"over-refinement self-healing", self_healing},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        failed += !o.pass;
        std::printf("%s %zu %s (%.2f s)%s%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, seconds_since(t0),
                    o.detail.empty() ? "" : ": ", o.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
