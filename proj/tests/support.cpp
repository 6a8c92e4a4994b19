#include "support.hpp"

#include <algorithm>
#include <numeric>

namespace testing_support {

using eikonal::GraphSpec;
using eikonal::MetricGraph;
using eikonal::Rational;
using eikonal::VertexKind;

namespace {

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

struct Sketch {
    std::vector<bool> interior;
    std::vector<std::pair<int, int>> edges;

    int add_vertex(bool inner) {
        interior.push_back(inner);
        return static_cast<int>(interior.size()) - 1;
    }
    std::vector<int> leaves() const {
        std::vector<int> out;
        for (int v = 0; v < static_cast<int>(interior.size()); ++v) {
            if (!interior[v]) out.push_back(v);
        }
        return out;
    }
};

// Grow a tree by turning leaves into branch points or adding leaves to
// existing interior vertices until the edge budget runs out.
void grow(Sketch& s, std::mt19937_64& rng, int budget) {
    while (budget > 0) {
        std::vector<int> inner;
        for (int v = 0; v < static_cast<int>(s.interior.size()); ++v) {
            if (s.interior[v]) inner.push_back(v);
        }
        if (budget >= 2 && uniform(rng, 0, 2) > 0) {
            auto leaves = s.leaves();
            int leaf = leaves[uniform(rng, 0, static_cast<int>(leaves.size()) - 1)];
            s.interior[leaf] = true;
            for (int k = 0; k < 2; ++k) s.edges.emplace_back(leaf, s.add_vertex(false));
            budget -= 2;
        } else if (!inner.empty() && uniform(rng, 0, 1) == 0) {
            int v = inner[uniform(rng, 0, static_cast<int>(inner.size()) - 1)];
            s.edges.emplace_back(v, s.add_vertex(false));
            budget -= 1;
        } else {
            break;
        }
    }
}

GraphSpec finish(const Sketch& s, std::mt19937_64& rng) {
    GraphSpec spec;
    for (std::size_t v = 0; v < s.interior.size(); ++v) {
        spec.graph.add_vertex((s.interior[v] ? "v" : "g") + std::to_string(v),
                              s.interior[v] ? VertexKind::interior : VertexKind::boundary);
    }
    for (std::size_t e = 0; e < s.edges.size(); ++e) {
        auto [a, b] = s.edges[e];
        if (uniform(rng, 0, 1)) std::swap(a, b);
        spec.graph.add_edge("e" + std::to_string(e), a, b, random_length(rng));
    }
    auto leaves = s.leaves();
    std::size_t gamma = leaves[uniform(rng, 0, static_cast<int>(leaves.size()) - 1)];
    spec.control.sigma = {gamma};
    int den = uniform(rng, 2, 12);
    int num = uniform(rng, 1, den - 1);
    Rational scale = eikonal::filling_time(spec.graph, gamma);
    if (scale == 0) {
        // gamma is the only boundary vertex; fall back to the total length
        for (const auto& e : spec.graph.edges()) scale += e.length;
    }
    spec.control.horizon = scale * Rational(num) / Rational(den);
    return spec;
}

}  // namespace

Rational random_length(std::mt19937_64& rng) {
    int q = uniform(rng, 1, 7);
    // p/q in [1/2, 2]
    int lo = (q + 1) / 2;
    int hi = 2 * q;
    return Rational(uniform(rng, lo, hi)) / Rational(q);
}

GraphSpec random_tree(std::mt19937_64& rng, int max_edges) {
    Sketch s;
    if (max_edges < 3 || uniform(rng, 0, 9) == 0) {
        int a = s.add_vertex(false);
        int b = s.add_vertex(false);
        s.edges.emplace_back(a, b);
        return finish(s, rng);
    }
    int c = s.add_vertex(true);
    for (int k = 0; k < 3; ++k) s.edges.emplace_back(c, s.add_vertex(false));
    grow(s, rng, uniform(rng, 0, max_edges - 3));
    return finish(s, rng);
}

GraphSpec random_unicyclic(std::mt19937_64& rng, int max_edges) {
    Sketch s;
    int cycle = uniform(rng, 1, std::min(3, max_edges / 2));
    std::vector<int> ring;
    for (int k = 0; k < cycle; ++k) ring.push_back(s.add_vertex(true));
    if (cycle == 1) {
        s.edges.emplace_back(ring[0], ring[0]);
    } else if (cycle == 2) {
        s.edges.emplace_back(ring[0], ring[1]);
        s.edges.emplace_back(ring[1], ring[0]);
    } else {
        for (int k = 0; k < cycle; ++k) s.edges.emplace_back(ring[k], ring[(k + 1) % cycle]);
    }
    for (int v : ring) s.edges.emplace_back(v, s.add_vertex(false));
    grow(s, rng, max_edges - static_cast<int>(s.edges.size()));
    return finish(s, rng);
}

GraphSpec relabel_and_flip(const GraphSpec& spec, std::mt19937_64& rng, std::map<std::string, std::string>* renamed) {
    const auto& g = spec.graph;
    std::vector<std::size_t> vorder(g.vertices().size());
    std::iota(vorder.begin(), vorder.end(), std::size_t{0});
    std::shuffle(vorder.begin(), vorder.end(), rng);
    std::vector<std::size_t> vmap(vorder.size());
    GraphSpec out;
    for (std::size_t k = 0; k < vorder.size(); ++k) {
        vmap[vorder[k]] = k;
        out.graph.add_vertex("n" + std::to_string(k), g.vertex(vorder[k]).kind);
        if (renamed) (*renamed)[g.vertex(vorder[k]).id] = "n" + std::to_string(k);
    }
    std::vector<std::size_t> eorder(g.edges().size());
    std::iota(eorder.begin(), eorder.end(), std::size_t{0});
    std::shuffle(eorder.begin(), eorder.end(), rng);
    for (std::size_t k = 0; k < eorder.size(); ++k) {
        const auto& e = g.edge(eorder[k]);
        // infinite edges keep their far end at the head
        auto a = e.infinite ? vmap[e.tail] : vmap[e.head];
        auto b = e.infinite ? vmap[e.head] : vmap[e.tail];
        out.graph.add_edge("f" + std::to_string(k), a, b, e.length, e.infinite);
    }
    for (auto v : spec.control.sigma) out.control.sigma.push_back(vmap[v]);
    std::sort(out.control.sigma.begin(), out.control.sigma.end());
    out.control.horizon = spec.control.horizon;
    return out;
}

eikonal::FrameGraph rename_sources(const eikonal::FrameGraph& f, const std::map<std::string, std::string>& renamed,
                                   const std::vector<std::string>& order) {
    std::vector<std::size_t> from;  // new slot -> old slot
    for (const auto& id : order) {
        for (std::size_t s = 0; s < f.sources.size(); ++s) {
            if (renamed.at(f.sources[s]) == id) from.push_back(s);
        }
    }
    if (from.size() != f.sources.size()) throw std::invalid_argument("source sets differ");
    auto out = f;
    out.sources = order;
    for (auto& v : out.vertices) {
        for (std::size_t s = 0; s < from.size(); ++s) v.coords[s] = f.vertices[&v - out.vertices.data()].coords[from[s]];
    }
    for (auto& e : out.edges) {
        for (std::size_t s = 0; s < from.size(); ++s) e.coords[s] = f.edges[&e - out.edges.data()].coords[from[s]];
    }
    return out;
}

}  // namespace testing_support
