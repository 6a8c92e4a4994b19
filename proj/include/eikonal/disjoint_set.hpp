#pragma once

#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

namespace eikonal {

/// Union-find over dense indices with path compression and union by rank.
class DisjointSet {
public:
    explicit DisjointSet(std::size_t n) : parent_(n), rank_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
        return true;
    }

    std::size_t size() const { return parent_.size(); }

    /// Classes as index lists; classes ordered by their smallest member,
    /// members ascending.
    std::vector<std::vector<std::size_t>> classes() {
        std::vector<std::vector<std::size_t>> out;
        std::vector<std::size_t> slot(parent_.size(), parent_.size());
        for (std::size_t i = 0; i < parent_.size(); ++i) {
            auto r = find(i);
            if (slot[r] == parent_.size()) {
                slot[r] = out.size();
                out.emplace_back();
            }
            out[slot[r]].push_back(i);
        }
        return out;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> rank_;
};

/// Union-find that also tracks a parity bit relative to the class root.
/// Used to orient cells coherently: unite(a, b, flip) records
/// parity(a) xor parity(b) == flip.
class ParityDisjointSet {
public:
    explicit ParityDisjointSet(std::size_t n) : parent_(n), parity_(n, false) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    /// Root of x and the parity of x relative to it.
    std::pair<std::size_t, bool> find(std::size_t x) {
        bool p = false;
        std::size_t r = x;
        while (parent_[r] != r) {
            p ^= parity_[r];
            r = parent_[r];
        }
        // Compress: point x's chain straight at the root.
        bool acc = p;
        while (parent_[x] != x) {
            auto next = parent_[x];
            bool own = parity_[x];
            parent_[x] = r;
            parity_[x] = acc;
            acc ^= own;
            x = next;
        }
        return {r, p};
    }

    /// Returns false on a parity contradiction.
    bool unite(std::size_t a, std::size_t b, bool flip) {
        auto [ra, pa] = find(a);
        auto [rb, pb] = find(b);
        if (ra == rb) return (pa ^ pb) == flip;
        parent_[rb] = ra;
        parity_[rb] = pa ^ pb ^ flip;
        return true;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<bool> parity_;
};

}  // namespace eikonal
