#include "doctest.h"
#include "support.hpp"

#include "eikonal/canon_algebraic.hpp"
#include "eikonal/canon_geometric.hpp"

#include <random>

using namespace eikonal;
using testing_support::load;
using testing_support::R;

TEST_CASE("nort partition of the 3-star") {
    auto form = assemble_source_form(load("star3.graph"));
    auto classes = nort_partition(form, 1);
    // the two directions are orthogonal: two singleton classes
    REQUIRE(classes.size() == 2);
    for (const auto& c : classes) {
        CHECK(c.kappa == 1);
        CHECK(c.closure_dim == 1);
        CHECK(c.exact_closure_dim == 1);
    }
}

TEST_CASE("canonical form A of small graphs") {
    SUBCASE("interval") {
        auto a = merge_chains(assemble_source_form(load("interval.graph")));
        REQUIRE(a.blocks.size() == 1);
        CHECK(a.blocks[0].length == 1);
        CHECK(a.blocks[0].kappa == 1);
        REQUIRE(a.blocks[0].terms.size() == 1);
        CHECK(a.blocks[0].terms[0].tau == AffineTime{1, Rational(1)});
        CHECK(check_canonical_a(a).empty());
    }
    SUBCASE("3-star") {
        auto form = assemble_source_form(load("star3.graph"));
        CHECK(source_blocks(form).size() == 3);
        auto a = merge_chains(form);
        REQUIRE(a.blocks.size() == 1);
        const auto& b = a.blocks[0];
        CHECK(b.length == R("3/2"));
        CHECK(b.kappa == 1);
        REQUIRE(b.terms.size() == 1);
        CHECK(b.terms[0].tau == AffineTime{1, Rational(1)});
        CHECK(b.terms[0].projector(0, 0) == doctest::Approx(1.0));
        CHECK(b.pieces.size() == 3);
        CHECK(check_canonical_a(a).empty());
    }
}

TEST_CASE("boundary representation equivalence") {
    auto form = assemble_source_form(load("star3.graph"));
    auto blocks = source_blocks(form);
    auto [m0, p0] = boundary_reps(blocks[0], 1);
    auto [m1, p1] = boundary_reps(blocks[1], 1);
    // spectra {1} vs {3/2} and {2}: nothing matches at r = 0 of block 0
    CHECK_FALSE(equivalent(m0, m1));
    std::string why;
    CHECK_FALSE(equivalent(m0, p0, &why));
    CHECK_FALSE(why.empty());
}

TEST_CASE("canonical form G of the 3-star") {
    auto form = assemble_source_form(load("star3.graph"));
    auto subs = split_families(form);
    REQUIRE(subs.size() == 3);  // Phi0, Phi1 on e1, Phi1 on e2 and e3
    CHECK(subs[1].cell_indices.size() == 1);
    CHECK(subs[2].cell_indices.size() == 2);

    const auto& g = form.spec.graph;
    auto c = family_connectable(g, 1, subs[0].data, subs[1].data);
    REQUIRE(c);
    CHECK_FALSE(family_connectable(g, 1, subs[1].data, subs[2].data));
    CHECK_FALSE(family_connectable(g, 1, subs[0].data, subs[0].data));

    auto gf = geometric_form(form);
    CHECK(check_geometric(gf).empty());
    REQUIRE(gf.families.size() == 2);
    const auto& e1 = gf.families[0].size() == 1 ? gf.families[0] : gf.families[1];
    const auto& e23 = gf.families[0].size() == 1 ? gf.families[1] : gf.families[0];
    CHECK(e1.length == 1);
    REQUIRE(e1.terms[0].size() == 1);
    CHECK(e1.terms[0][0].tau == AffineTime{1, Rational(1)});
    CHECK(e1.cells[0].size() == 2);
    CHECK(e23.length == R("1/2"));
    REQUIRE(e23.terms[0].size() == 1);
    CHECK(e23.terms[0][0].tau == AffineTime{1, Rational(2)});
    CHECK(e23.terms[0][0].projector.beta == RationalVector{Rational(1), Rational(1)});
    // the junction at the middle of e1 is no longer critical
    CHECK(gf.critical.size() == form.critical.size() - 1);
}

TEST_CASE("extra cuts heal") {
    auto spec = load("interval.graph");
    AssembleOptions opt;
    opt.extra_cuts = {GraphPoint::on_edge(spec.graph, 0, R("1/3"))};
    auto form = assemble_source_form(spec, opt);
    REQUIRE(form.families.size() == 2);
    auto gf = geometric_form(form);
    REQUIRE(gf.families.size() == 1);
    CHECK(gf.families[0].length == 1);
    auto a = merge_chains(form);
    REQUIRE(a.blocks.size() == 1);
    CHECK(a.blocks[0].length == 1);
}

TEST_CASE("canonical forms on random graphs") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 12; ++trial) {
        auto spec = trial % 3 == 2 ? testing_support::random_unicyclic(rng) : testing_support::random_tree(rng);
        CAPTURE(serialize_graph(spec));
        auto form = assemble_source_form(spec);
        auto a = merge_chains(form);
        CHECK(check_canonical_a(a).empty());
        // every block is a chain of source blocks
        Rational total = 0;
        for (const auto& b : a.blocks) {
            Rational len = 0;
            for (const auto& p : b.pieces) len += p.length;
            CHECK(len == b.length);
        }
        auto gf = geometric_form(form);
        CHECK(check_geometric(gf).empty());
        CHECK(gf.families.size() <= split_families(form).size());
        (void)total;
    }
}
