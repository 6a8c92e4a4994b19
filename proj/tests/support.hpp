#pragma once

#include "eikonal/frames.hpp"
#include "eikonal/graph.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testing_support {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline eikonal::GraphSpec load(const std::string& name) {
    return eikonal::parse_graph(read_file(std::string(EIKONAL_TEST_DATA) + "/" + name));
}

inline eikonal::Rational R(const char* text) { return eikonal::parse_rational(text); }

// Random rational in [lo_num/den, hi_num/den] style ranges; lengths land in
// [1/2, 2] with denominators up to 7.
eikonal::Rational random_length(std::mt19937_64& rng);

/// Random tree with at most max_edges edges, one random controlled leaf and a
/// horizon strictly below its filling time.
eikonal::GraphSpec random_tree(std::mt19937_64& rng, int max_edges = 8);

/// Random graph with exactly one cycle and at most max_edges edges.
eikonal::GraphSpec random_unicyclic(std::mt19937_64& rng, int max_edges = 6);

/// Same graph with shuffled ids and every edge reversed; `renamed` receives
/// the old -> new vertex ids.
eikonal::GraphSpec relabel_and_flip(const eikonal::GraphSpec& spec, std::mt19937_64& rng,
                                    std::map<std::string, std::string>* renamed = nullptr);

/// Frame with its sources renamed and reordered to `order`.
eikonal::FrameGraph rename_sources(const eikonal::FrameGraph& f, const std::map<std::string, std::string>& renamed,
                                   const std::vector<std::string>& order);

}  // namespace testing_support
