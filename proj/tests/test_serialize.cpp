#include "doctest.h"
#include "support.hpp"

#include "eikonal/serialize.hpp"

#include <random>

using namespace eikonal;
using testing_support::load;

namespace {

void round_trips(const GraphSpec& spec) {
    auto source = assemble_source_form(spec);
    auto text = write_source_form(source);
    CHECK(artifact_kind(text) == "source-form");
    auto back = read_source_form(text);
    CHECK(write_source_form(back) == text);
    CHECK(back.critical == source.critical);

    // later stages computed from the reloaded form are identical
    auto a = merge_chains(source);
    auto a_text = write_canonical_a(a);
    CHECK(write_canonical_a(merge_chains(back)) == a_text);
    auto a_back = read_canonical_a(a_text);
    CHECK(write_canonical_a(a_back) == a_text);
    CHECK(write_frame(build_frame_algebraic(a_back)) == write_frame(build_frame_algebraic(a)));

    auto g = geometric_form(source);
    auto g_text = write_geometric(g);
    auto g_back = read_geometric(g_text);
    CHECK(write_geometric(g_back) == g_text);
    auto fg = build_frame_geometric(g);
    CHECK(write_frame(build_frame_geometric(g_back)) == write_frame(fg));
    auto f_back = read_frame(write_frame(fg));
    CHECK(frame_isometry(f_back, fg));
}

}  // namespace

TEST_CASE("artifacts round trip") {
    round_trips(load("interval.graph"));
    round_trips(load("star3.graph"));
    std::mt19937_64 rng(5);
    for (int i = 0; i < 4; ++i) round_trips(i % 2 ? testing_support::random_unicyclic(rng) : testing_support::random_tree(rng));
}

TEST_CASE("DOT export and hydra dump") {
    auto spec = load("star3.graph");
    auto fg = build_frame_geometric(geometric_form(assemble_source_form(spec)));
    auto dot = frame_dot(fg);
    CHECK(dot.rfind("graph frame_g {", 0) == 0);
    CHECK(dot.find("{2}") != std::string::npos);
    CHECK(dot.find("length 1/2") != std::string::npos);

    std::vector<std::vector<Ray>> rays{trace_rays(spec.graph, 0, spec.control.horizon)};
    auto hydra = write_hydra(spec, rays);
    CHECK(artifact_kind(hydra) == "hydra");
    CHECK(hydra.find("\"amplitude\": \"-1/3\"") != std::string::npos);
}

TEST_CASE("malformed artifacts") {
    auto text = write_source_form(assemble_source_form(load("interval.graph")));
    CHECK_THROWS_AS(read_canonical_a(text), FormatError);
    CHECK_THROWS_AS(read_source_form("{not json"), FormatError);
    auto broken = text;
    broken.replace(broken.find("\"length\": \"1\""), 13, "\"length\": 1");
    CHECK_THROWS_AS(read_source_form(broken), FormatError);
    auto unknown_edge = text;
    unknown_edge.replace(unknown_edge.find("\"edge\": \"e1\""), 12, "\"edge\": \"zz\"");
    CHECK_THROWS_AS(read_source_form(unknown_edge), FormatError);
}
