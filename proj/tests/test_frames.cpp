#include "doctest.h"
#include "support.hpp"

#include "eikonal/frames.hpp"

#include <random>

using namespace eikonal;
using testing_support::load;
using testing_support::R;

namespace {

struct Pipeline {
    SourceParametricForm source;
    CanonicalFormA a;
    GeometricForm g;
    FrameGraph fa;
    FrameGraph fg;
};

Pipeline run(const GraphSpec& spec, const AssembleOptions& opt = {}) {
    Pipeline p;
    p.source = assemble_source_form(spec, opt);
    p.a = merge_chains(p.source);
    p.g = geometric_form(p.source);
    p.fa = build_frame_algebraic(p.a);
    p.fg = build_frame_geometric(p.g);
    return p;
}

Coordinates coords(std::initializer_list<const char*> values) {
    Coordinates c(1);
    for (auto v : values) c[0].push_back(R(v));
    return c;
}

}  // namespace

TEST_CASE("interval frames") {
    auto p = run(load("interval.graph"));
    for (const auto* f : {&p.fa, &p.fg}) {
        REQUIRE(f->edges.size() == 1);
        CHECK(f->edges[0].length == 1);
        REQUIRE(f->vertices.size() == 2);
        CHECK(f->vertices[f->edges[0].tail].coords == coords({"1"}));
        CHECK(f->vertices[f->edges[0].head].coords == coords({"2"}));
        CHECK(check_frame(*f).empty());
    }
    CHECK(check_ordinary(p.source).ordinary);
    CHECK(frame_isometry(p.fa, p.fg));
    auto m = evaluate_on_frame(p.a, p.fa, "E_g1", FramePoint{false, 0, R("1/3")});
    CHECK(m(0, 0) == doctest::Approx(4.0 / 3));
}

TEST_CASE("3-star frames") {
    auto p = run(load("star3.graph"));
    REQUIRE(p.fa.edges.size() == 1);
    CHECK(p.fa.edges[0].length == R("3/2"));
    CHECK(p.fa.vertices[p.fa.edges[0].tail].coords == coords({"1"}));
    CHECK(p.fa.vertices[p.fa.edges[0].head].coords == coords({"5/2"}));

    REQUIRE(p.fg.edges.size() == 2);
    std::vector<Rational> lengths = {p.fg.edges[0].length, p.fg.edges[1].length};
    std::sort(lengths.begin(), lengths.end());
    CHECK(lengths == std::vector<Rational>{R("1/2"), R("1")});
    REQUIRE(p.fg.vertices.size() == 3);
    std::size_t middle = 0;
    for (std::size_t v = 0; v < 3; ++v) {
        if (p.fg.valence(v) == 2) middle = v;
    }
    CHECK(p.fg.valence(middle) == 2);
    CHECK(p.fg.vertices[middle].coords == coords({"2"}));
    CHECK(check_frame(p.fa).empty());
    CHECK(check_frame(p.fg).empty());

    CHECK(check_ordinary(p.source).ordinary);
    std::string why;
    auto iso = frame_isometry(p.fa, p.fg, &why);
    REQUIRE_MESSAGE(iso, why);
    CHECK(iso->pieces.size() == 2);
    // the valence-2 vertex lands at parameter 1 of the algebraic edge
    bool landed = false;
    for (const auto& [pa, pg] : iso->vertices) {
        if (!pa.vertex && pa.r == 1 && pg.vertex && pg.index == middle) landed = true;
    }
    CHECK(landed);

    auto sq = evaluate_on_frame(p.a, p.fa, "E_g1^2", FramePoint{false, 0, R("5/4")});
    CHECK(sq(0, 0) == doctest::Approx(81.0 / 16));
    auto zero = evaluate_on_frame(p.a, p.fa, "E_g1*0", FramePoint{true, 0, 0});
    CHECK(zero.norm() == 0);
    auto combo = evaluate_on_frame(p.a, p.fa, "(E_g1 - 1/2) * 2 + -1.5", FramePoint{false, 0, R("1/2")});
    CHECK(combo(0, 0) == doctest::Approx(0.5));

    // the e2/e3 edge of the geometric frame carries a 2x2 block
    std::size_t e23 = p.fg.edges[0].length == R("1/2") ? 0 : 1;
    auto m = evaluate_on_frame(p.g, p.fg, "E_g1", FramePoint{false, e23, R("1/4")});
    CHECK(m.rows() == 2);
    CHECK(m(0, 1) == doctest::Approx(9.0 / 8));
    // vertex: direct sum over the glued ends
    auto w = evaluate_on_frame(p.g, p.fg, "E_g1", FramePoint{true, middle, 0});
    CHECK(w.rows() == 3);

    CHECK_THROWS_AS(evaluate_on_frame(p.a, p.fa, "E_g1 +", FramePoint{false, 0, R("1/2")}), ExpressionError);
    CHECK_THROWS_AS(evaluate_on_frame(p.a, p.fa, "E_zz", FramePoint{false, 0, R("1/2")}), ExpressionError);
    CHECK_THROWS_AS(evaluate_on_frame(p.a, p.fa, "(E_g1", FramePoint{false, 0, R("1/2")}), ExpressionError);
}

TEST_CASE("spectrum points") {
    auto p = run(load("star3.graph"));
    auto boundary = spectrum_boundary(p.a);
    REQUIRE(boundary.size() == 2);
    CHECK(boundary[1].coords == coords({"5/2"}));
    CHECK(spectrum_interior(p.a, 0, R("1/2")).coords == coords({"3/2"}));
    CHECK_THROWS(spectrum_interior(p.a, 0, 0));
}

TEST_CASE("isometry rejections") {
    auto interval = run(load("interval.graph"));
    auto star = run(load("star3.graph"));
    std::string why;
    CHECK_FALSE(frame_isometry(interval.fa, star.fa, &why));
    CHECK(why.find("total lengths") != std::string::npos);

    auto broken = star.fg;
    std::swap(broken.edges[0].coords, broken.edges[1].coords);
    CHECK_FALSE(frame_isometry(star.fa, broken, &why));
}

TEST_CASE("over-refinement heals") {
    auto spec = load("star3.graph");
    auto base = run(spec);
    for (const char* cut : {"1/4", "1/3", "3/4"}) {
        AssembleOptions opt;
        opt.extra_cuts = {GraphPoint::on_edge(spec.graph, 0, R(cut))};
        auto p = run(spec, opt);
        REQUIRE(p.a.blocks.size() == base.a.blocks.size());
        CHECK(p.a.blocks[0].length == base.a.blocks[0].length);
        CHECK(p.a.blocks[0].terms[0].tau == base.a.blocks[0].terms[0].tau);
        CHECK(frame_isometry(p.fa, base.fa));
        CHECK(frame_isometry(p.fg, base.fg));
    }
}

TEST_CASE("frames on random graphs") {
    std::mt19937_64 rng(99);
    int ordinary = 0;
    for (int trial = 0; trial < 12; ++trial) {
        auto spec = trial % 3 == 2 ? testing_support::random_unicyclic(rng) : testing_support::random_tree(rng);
        CAPTURE(serialize_graph(spec));
        auto p = run(spec);
        CHECK(check_frame(p.fa).empty());
        CHECK(check_frame(p.fg).empty());
        std::map<std::string, std::string> renamed;
        auto flipped = run(testing_support::relabel_and_flip(spec, rng, &renamed));
        auto moved = testing_support::rename_sources(p.fa, renamed, flipped.fa.sources);
        std::string why;
        CHECK_MESSAGE(frame_isometry(moved, flipped.fa, &why), why);
        if (check_ordinary(p.source).ordinary) {
            ++ordinary;
            CHECK_MESSAGE(frame_isometry(p.fa, p.fg, &why), why);
        }
    }
    CHECK(ordinary > 0);
}
