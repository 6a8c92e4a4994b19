#include "eikonal/canon_algebraic.hpp"

#include "eikonal/disjoint_set.hpp"
#include "eikonal/log.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace eikonal {

std::vector<NortClass> nort_partition(const SourceParametricForm& form, std::size_t family) {
    const auto& f = form.families.at(family);
    std::vector<TermRef> refs;
    for (std::size_t s = 0; s < f.terms.size(); ++s) {
        for (std::size_t i = 0; i < f.terms[s].size(); ++i) refs.push_back(TermRef{s, i});
    }
    auto beta = [&](const TermRef& r) -> const ProjectorVec& { return f.terms[r.source][r.term].projector; };
    // Terms of one source are orthogonal by construction, so only pairs from
    // different sources sharing a cell can be linked.
    const std::size_t m = f.family.cells.size();
    std::vector<std::vector<std::pair<std::size_t, Rational>>> sparse(refs.size());
    std::vector<std::vector<std::size_t>> at_cell(m);
    for (std::size_t a = 0; a < refs.size(); ++a) {
        const auto& b = beta(refs[a]).beta;
        for (std::size_t k = 0; k < b.size(); ++k) {
            if (b[k] == 0) continue;
            sparse[a].emplace_back(k, b[k]);
            at_cell[k].push_back(a);
        }
    }
    auto sparse_dot = [&](std::size_t a, std::size_t b) {
        Rational sum = 0;
        auto i = sparse[a].begin(), j = sparse[b].begin();
        while (i != sparse[a].end() && j != sparse[b].end()) {
            if (i->first < j->first) {
                ++i;
            } else if (j->first < i->first) {
                ++j;
            } else {
                sum += i->second * j->second;
                ++i;
                ++j;
            }
        }
        return sum;
    };
    DisjointSet dsu(refs.size());
    std::set<std::pair<std::size_t, std::size_t>> done;
    for (const auto& list : at_cell) {
        for (std::size_t x = 0; x < list.size(); ++x) {
            for (std::size_t y = x + 1; y < list.size(); ++y) {
                const auto a = list[x], b = list[y];
                if (refs[a].source == refs[b].source || dsu.find(a) == dsu.find(b)) continue;
                if (!done.insert({a, b}).second) continue;
                if (sparse_dot(a, b) != 0) dsu.unite(a, b);
            }
        }
    }
    std::vector<NortClass> out;
    for (const auto& cls : dsu.classes()) {
        NortClass nc;
        nc.family = family;
        std::vector<RationalVector> vecs;
        for (auto i : cls) {
            nc.members.push_back(refs[i]);
            vecs.push_back(unit_scaled(beta(refs[i]).beta));
        }
        std::sort(nc.members.begin(), nc.members.end());
        auto basis = span_basis(vecs);
        nc.kappa = basis.chosen.size();
        // Projectors in coordinates of the class span, exactly and in an
        // orthonormal frame.
        RationalMatrix ginv = inverse(basis.gram);
        std::vector<RationalMatrix> exact;
        std::vector<Matrix> floats;
        for (const auto& v : vecs) {
            RationalVector w(nc.kappa);
            for (std::size_t c = 0; c < nc.kappa; ++c) w[c] = dot(vecs[basis.chosen[c]], v);
            Rational n2 = dot(v, v);
            RationalMatrix outer = zero_matrix(nc.kappa, nc.kappa);
            for (std::size_t i = 0; i < nc.kappa; ++i) {
                for (std::size_t j = 0; j < nc.kappa; ++j) outer[i][j] = w[i] * w[j] / n2;
            }
            exact.push_back(multiply(ginv, outer));
            Eigen::VectorXd p = basis.chol_inv * to_matrix(RationalMatrix{w}).transpose() / std::sqrt(to_double(n2));
            floats.push_back(p * p.transpose());
        }
        nc.closure_dim = word_closure_dimension(std::span<const Matrix>(floats));
        nc.exact_closure_dim = nc.kappa <= 6 ? word_closure_dimension(std::span<const RationalMatrix>(exact)) : 0;
        out.push_back(std::move(nc));
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// A nort class block together with the exact data used for equivalence.
struct SourceBlock {
    ABlock block;
    std::size_t family = 0;
    std::vector<std::size_t> term_source;        // per block term
    std::vector<RationalMatrix> exact_projector;  // per block term, class coordinates
};

std::vector<Matrix> generators_at(std::span<const BlockTerm> terms, std::size_t kappa, std::size_t sources,
                                  const Rational& r) {
    std::vector<Matrix> out(sources, Matrix::Zero(static_cast<Eigen::Index>(kappa), static_cast<Eigen::Index>(kappa)));
    for (const auto& t : terms) out[t.source] += to_double(t.tau.at(r)) * t.projector;
    return out;
}

std::vector<RationalMatrix> exact_generators_at(const SourceBlock& sb, std::size_t sources, const Rational& r) {
    const auto k = sb.block.kappa;
    std::vector<RationalMatrix> out(sources, zero_matrix(k, k));
    for (std::size_t i = 0; i < sb.block.terms.size(); ++i) {
        const auto& t = sb.block.terms[i];
        Rational tau = t.tau.at(r);
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < k; ++b) out[t.source][a][b] += tau * sb.exact_projector[i][a][b];
        }
    }
    return out;
}

std::vector<SourceBlock> build_source_blocks(const SourceParametricForm& form) {
    const std::size_t sources = form.spec.control.sigma.size();
    std::vector<SourceBlock> out;
    for (std::size_t j = 0; j < form.families.size(); ++j) {
        const auto& f = form.families[j];
        auto classes = nort_partition(form, j);
        for (std::size_t c = 0; c < classes.size(); ++c) {
            const auto& nc = classes[c];
            std::vector<RationalVector> vecs;
            for (const auto& m : nc.members) vecs.push_back(unit_scaled(f.terms[m.source][m.term].projector.beta));
            auto basis = span_basis(vecs);
            RationalMatrix ginv = inverse(basis.gram);
            SourceBlock sb;
            sb.family = j;
            sb.block.length = f.family.length;
            sb.block.kappa = nc.kappa;
            sb.block.pieces.push_back(BlockPiece{j, c, false, Rational(0), f.family.length});
            for (std::size_t i = 0; i < nc.members.size(); ++i) {
                const auto& term = f.terms[nc.members[i].source][nc.members[i].term];
                const auto& v = vecs[i];
                const Rational n2 = dot(v, v);
                RationalVector w(nc.kappa);
                for (std::size_t a = 0; a < nc.kappa; ++a) w[a] = dot(vecs[basis.chosen[a]], v);
                RationalMatrix outer = zero_matrix(nc.kappa, nc.kappa);
                for (std::size_t a = 0; a < nc.kappa; ++a) {
                    for (std::size_t b = 0; b < nc.kappa; ++b) outer[a][b] = w[a] * w[b] / n2;
                }
                sb.exact_projector.push_back(multiply(ginv, outer));
                Eigen::VectorXd p = basis.chol_inv * to_matrix(RationalMatrix{w}).transpose() / std::sqrt(to_double(n2));
                sb.block.terms.push_back(BlockTerm{nc.members[i].source, term.tau, p * p.transpose()});
            }
            auto lo = generators_at(sb.block.terms, sb.block.kappa, sources, Rational(0));
            auto hi = generators_at(sb.block.terms, sb.block.kappa, sources, sb.block.length);
            sb.block.minus = decompose(lo);
            sb.block.plus = decompose(hi);
            out.push_back(std::move(sb));
        }
    }
    return out;
}

// Per-source sorted tau values at one end: necessary for equivalence.
std::vector<std::vector<Rational>> spectrum_key(const ABlock& b, std::size_t sources, bool at_end) {
    std::vector<std::vector<Rational>> key(sources);
    for (const auto& t : b.terms) key[t.source].push_back(t.tau.at(at_end ? b.length : Rational(0)));
    for (auto& k : key) std::sort(k.begin(), k.end());
    return key;
}

std::vector<Rational> sorted_values(const std::vector<BlockTerm>& terms, const Rational& r) {
    std::vector<Rational> v;
    for (const auto& t : terms) v.push_back(t.tau.at(r));
    std::sort(v.begin(), v.end());
    return v;
}

void sort_terms(ABlock& b) {
    Rational mid = b.length / 2;
    std::stable_sort(b.terms.begin(), b.terms.end(), [&](const BlockTerm& x, const BlockTerm& y) {
        if (x.source != y.source) return x.source < y.source;
        return x.tau.at(mid) < y.tau.at(mid);
    });
}

void reverse_block(ABlock& b) {
    for (auto& t : b.terms) t.tau = t.tau.reversed(b.length);
    std::reverse(b.pieces.begin(), b.pieces.end());
    for (auto& p : b.pieces) {
        p.offset = b.length - p.offset - p.length;
        p.reversed = !p.reversed;
    }
    std::swap(b.minus, b.plus);
}

}  // namespace

std::vector<Matrix> block_generators(const ABlock& block, std::size_t sources, const Rational& r) {
    return generators_at(block.terms, block.kappa, sources, r);
}

std::pair<BoundaryRep, BoundaryRep> boundary_reps(const ABlock& block, std::size_t sources) {
    return {BoundaryRep{block_generators(block, sources, Rational(0)), {}},
            BoundaryRep{block_generators(block, sources, block.length), {}}};
}

std::optional<Matrix> equivalent(const BoundaryRep& rho, const BoundaryRep& rho_prime, std::string* why) {
    if (rho.mats.size() != rho_prime.mats.size()) {
        if (why) *why = "different numbers of generators";
        return std::nullopt;
    }
    if (!rho.exact.empty() && !rho_prime.exact.empty()) {
        if (!trace_equivalent(rho.exact, rho_prime.exact, why)) return std::nullopt;
        auto y = orthogonal_intertwiner(rho.mats, rho_prime.mats);
        if (!y) throw PipelineError("equivalent representations without a numerical intertwiner");
        return y;
    }
    // Float-only comparison: eigenvalues per generator, then an intertwiner.
    for (std::size_t k = 0; k < rho.mats.size(); ++k) {
        if (rho.mats[k].rows() != rho_prime.mats[k].rows()) {
            if (why) *why = "dimensions differ";
            return std::nullopt;
        }
        Eigen::SelfAdjointEigenSolver<Matrix> a(rho.mats[k]), b(rho_prime.mats[k]);
        if ((a.eigenvalues() - b.eigenvalues()).cwiseAbs().maxCoeff() > 1e-9) {
            if (why) *why = "eigenvalues of generator " + std::to_string(k) + " differ";
            return std::nullopt;
        }
    }
    auto y = orthogonal_intertwiner(rho.mats, rho_prime.mats);
    if (!y && why) *why = "no orthogonal intertwiner";
    return y;
}

std::vector<ABlock> source_blocks(const SourceParametricForm& form) {
    std::vector<ABlock> out;
    for (auto& sb : build_source_blocks(form)) out.push_back(std::move(sb.block));
    return out;
}

CanonicalFormA merge_chains(const SourceParametricForm& form) {
    const std::size_t sources = form.spec.control.sigma.size();
    auto blocks = build_source_blocks(form);
    const std::size_t n = blocks.size();

    // End e = 2 * block + side (side 0: r = 0, side 1: r = length).
    std::map<std::vector<std::vector<Rational>>, std::vector<std::size_t>> by_key;
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t side = 0; side < 2; ++side) by_key[spectrum_key(blocks[b].block, sources, side == 1)].push_back(2 * b + side);
    }
    std::vector<std::vector<std::size_t>> partners(2 * n);
    std::size_t longest = 0;
    for (const auto& [key, ends] : by_key) {
        for (std::size_t i = 0; i < ends.size(); ++i) {
            for (std::size_t j = i + 1; j < ends.size(); ++j) {
                const auto a = ends[i], b = ends[j];
                const auto& ba = blocks[a / 2];
                const auto& bb = blocks[b / 2];
                auto ea = exact_generators_at(ba, sources, a % 2 ? ba.block.length : Rational(0));
                auto eb = exact_generators_at(bb, sources, b % 2 ? bb.block.length : Rational(0));
                std::size_t word = 0;
                if (!trace_equivalent(ea, eb, nullptr, &word)) continue;
                longest = std::max(longest, word);
                if (a / 2 == b / 2) throw PipelineError("boundary representations of one block are equivalent");
                partners[a].push_back(b);
                partners[b].push_back(a);
            }
        }
    }
    for (std::size_t e = 0; e < 2 * n; ++e) {
        if (partners[e].size() > 1) {
            throw PipelineError("chain structure inconsistent: a boundary representation of block " +
                                std::to_string(e / 2) + " is equivalent to " + std::to_string(partners[e].size()) +
                                " partners");
        }
    }

    CanonicalFormA out;
    out.spec = form.spec;
    out.longest_word = longest;
    std::vector<bool> used(n, false);
    auto walk = [&](std::size_t start, std::size_t free_side) {
        ABlock chain = blocks[start].block;
        if (free_side == 1) reverse_block(chain);
        used[start] = true;
        std::size_t exit = 2 * start + (1 - free_side);
        while (!partners[exit].empty()) {
            const std::size_t entry = partners[exit].front();
            const std::size_t b = entry / 2;
            if (used[b]) throw PipelineError("cyclic chain of connectable blocks");
            used[b] = true;
            ABlock next = blocks[b].block;
            if (entry % 2 == 1) reverse_block(next);
            auto a_end = generators_at(chain.terms, chain.kappa, sources, chain.length);
            auto b_start = generators_at(next.terms, next.kappa, sources, Rational(0));
            auto y = orthogonal_intertwiner(b_start, a_end);
            if (!y) throw PipelineError("no intertwiner between equivalent boundary representations");
            std::vector<bool> matched(chain.terms.size(), false);
            for (const auto& t : next.terms) {
                Matrix p = *y * t.projector * y->transpose();
                bool found = false;
                for (std::size_t i = 0; i < chain.terms.size() && !found; ++i) {
                    const auto& c = chain.terms[i];
                    if (matched[i] || c.source != t.source || c.tau.slope != t.tau.slope) continue;
                    if (c.tau.at(chain.length) != t.tau.at(0)) continue;
                    if ((c.projector - p).norm() > 1e-7) continue;
                    matched[i] = true;
                    found = true;
                }
                if (!found) throw PipelineError("tau functions do not continue across a block junction");
            }
            if (std::find(matched.begin(), matched.end(), false) != matched.end()) {
                throw PipelineError("unmatched term at a block junction");
            }
            for (auto p : next.pieces) {
                p.offset += chain.length;
                chain.pieces.push_back(p);
            }
            chain.length += next.length;
            chain.plus = next.plus;
            exit = b * 2 + (1 - entry % 2);
        }
        if (sorted_values(chain.terms, chain.length) < sorted_values(chain.terms, Rational(0))) reverse_block(chain);
        sort_terms(chain);
        out.blocks.push_back(std::move(chain));
    };
    for (std::size_t b = 0; b < n; ++b) {
        if (used[b]) continue;
        if (partners[2 * b].empty()) {
            walk(b, 0);
        } else if (partners[2 * b + 1].empty()) {
            walk(b, 1);
        }
    }
    for (std::size_t b = 0; b < n; ++b) {
        if (!used[b]) throw PipelineError("cyclic chain of connectable blocks");
    }
    std::sort(out.blocks.begin(), out.blocks.end(), [](const ABlock& x, const ABlock& y) {
        auto kx = std::tie(x.pieces.front().family, x.pieces.front().nort_class);
        auto ky = std::tie(y.pieces.front().family, y.pieces.front().nort_class);
        return kx < ky;
    });
    log::info("canonical form A: ", n, " source blocks merged into ", out.blocks.size());
    return out;
}

std::vector<std::string> check_canonical_a(const CanonicalFormA& form) {
    std::vector<std::string> problems;
    const std::size_t sources = form.spec.control.sigma.size();
    for (std::size_t b = 0; b < form.blocks.size(); ++b) {
        const auto& blk = form.blocks[b];
        std::vector<Matrix> projectors;
        for (const auto& t : blk.terms) {
            projectors.push_back(t.projector);
            if (t.tau.slope != 1 && t.tau.slope != -1) problems.push_back("non-unit slope in block " + std::to_string(b));
        }
        if (word_closure_dimension(projectors) != blk.kappa * blk.kappa) {
            problems.push_back("block " + std::to_string(b) + " does not generate a full matrix algebra");
        }
        if (spectrum_key(blk, sources, false) == spectrum_key(blk, sources, true)) {
            problems.push_back("block " + std::to_string(b) + " has equal spectra at both ends");
        }
    }
    return problems;
}

}  // namespace eikonal
