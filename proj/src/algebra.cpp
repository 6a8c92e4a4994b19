#include "eikonal/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

namespace eikonal {

Matrix to_matrix(const RationalMatrix& m) {
    const auto rows = static_cast<Eigen::Index>(m.size());
    const auto cols = static_cast<Eigen::Index>(m.empty() ? 0 : m.front().size());
    Matrix out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = to_double(m[i][j]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Word closure

namespace {

// Orthonormal basis of flattened matrices, grown one candidate at a time.
class FloatSpan {
public:
    explicit FloatSpan(double tol) : tol_(tol) {}

    bool add(const Matrix& m) {
        Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
        double norm = v.norm();
        if (norm == 0) return false;
        v /= norm;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : basis_) v -= q.dot(v) * q;
        }
        double r = v.norm();
        if (r <= tol_) return false;
        basis_.push_back(v / r);
        return true;
    }
    std::size_t size() const { return basis_.size(); }

private:
    double tol_;
    std::vector<Eigen::VectorXd> basis_;
};

// Exact span of flattened vectors in reduced echelon form.
class ExactSpan {
public:
    bool add(RationalVector v) {
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const auto p = pivots_[i];
            if (v[p] == 0) continue;
            Rational f = v[p];
            for (std::size_t c = 0; c < v.size(); ++c) {
                if (rows_[i][c] != 0) v[c] -= f * rows_[i][c];
            }
        }
        auto it = std::find_if(v.begin(), v.end(), [](const Rational& x) { return x != 0; });
        if (it == v.end()) return false;
        const auto p = static_cast<std::size_t>(it - v.begin());
        Rational inv = 1 / v[p];
        for (auto& x : v) {
            if (x != 0) x *= inv;
        }
        for (auto& row : rows_) {
            if (row[p] == 0) continue;
            Rational f = row[p];
            for (std::size_t c = 0; c < v.size(); ++c) {
                if (v[c] != 0) row[c] -= f * v[c];
            }
        }
        rows_.push_back(std::move(v));
        pivots_.push_back(p);
        return true;
    }
    std::size_t size() const { return rows_.size(); }

private:
    std::vector<RationalVector> rows_;
    std::vector<std::size_t> pivots_;
};

RationalVector flatten(std::initializer_list<const RationalMatrix*> parts) {
    RationalVector out;
    for (const auto* m : parts) {
        for (const auto& row : *m) out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

}  // namespace

std::size_t word_closure_dimension(std::span<const Matrix> generators, double tol) {
    FloatSpan span(tol);
    std::deque<Matrix> queue;
    for (const auto& g : generators) {
        if (span.add(g)) queue.push_back(g);
    }
    std::vector<Matrix> found(queue.begin(), queue.end());
    while (!queue.empty()) {
        Matrix x = std::move(queue.front());
        queue.pop_front();
        for (const auto& g : generators) {
            for (Matrix y : {Matrix(x * g), Matrix(g * x)}) {
                double n = y.norm();
                if (n == 0) continue;
                y /= n;
                if (span.add(y)) queue.push_back(y);
            }
        }
    }
    return span.size();
}

std::size_t word_closure_dimension(std::span<const RationalMatrix> generators) {
    ExactSpan span;
    std::deque<RationalMatrix> queue;
    for (const auto& g : generators) {
        if (span.add(flatten({&g}))) queue.push_back(g);
    }
    while (!queue.empty()) {
        RationalMatrix x = std::move(queue.front());
        queue.pop_front();
        for (const auto& g : generators) {
            for (auto y : {multiply(x, g), multiply(g, x)}) {
                if (span.add(flatten({&y}))) queue.push_back(std::move(y));
            }
        }
    }
    return span.size();
}

bool trace_equivalent(std::span<const RationalMatrix> a, std::span<const RationalMatrix> b, std::string* why,
                      std::size_t* longest_word) {
    auto reject = [&](std::string reason) {
        if (why) *why = std::move(reason);
        return false;
    };
    if (a.size() != b.size()) return reject("different numbers of generators");
    const std::size_t n = a.empty() ? 0 : a.front().size();
    const std::size_t m = b.empty() ? 0 : b.front().size();
    if (n != m) return reject("dimensions " + std::to_string(n) + " and " + std::to_string(m));
    // Cheap screen: generator traces and traces of squares.
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (trace(a[k]) != trace(b[k])) return reject("trace of generator " + std::to_string(k));
        if (trace(multiply(a[k], a[k])) != trace(multiply(b[k], b[k]))) {
            return reject("trace of squared generator " + std::to_string(k));
        }
    }
    // Spanning set of the joint algebra, tracking word lengths.
    struct Word {
        RationalMatrix x, y;
        std::size_t length;
    };
    ExactSpan span;
    std::deque<Word> queue;
    std::size_t longest = 0;
    auto consider = [&](Word w) {
        if (!span.add(flatten({&w.x, &w.y}))) return true;
        longest = std::max(longest, w.length);
        if (trace(w.x) != trace(w.y)) return false;
        queue.push_back(std::move(w));
        return true;
    };
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!consider(Word{a[k], b[k], 1})) return reject("trace of a word of length 1");
    }
    while (!queue.empty()) {
        Word w = std::move(queue.front());
        queue.pop_front();
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (!consider(Word{multiply(w.x, a[k]), multiply(w.y, b[k]), w.length + 1})) {
                return reject("trace of a word of length " + std::to_string(w.length + 1));
            }
        }
    }
    if (longest_word) *longest_word = longest;
    return true;
}

// ---------------------------------------------------------------------------
// Intertwiners and decomposition

namespace {

// Basis of {X : X a_k = b_k X} as matrices, by SVD of the stacked Sylvester
// operators.
std::vector<Matrix> intertwiner_space(std::span<const Matrix> a, std::span<const Matrix> b, double tol) {
    const Eigen::Index n = a.empty() ? 0 : a.front().rows();
    const Eigen::Index m = b.empty() ? 0 : b.front().rows();
    if (n == 0 || m == 0) return {};
    Matrix big = Matrix::Zero(static_cast<Eigen::Index>(a.size()) * m * n, m * n);
    for (std::size_t k = 0; k < a.size(); ++k) {
        // vec(X A - B X) = (A^T kron I_m - I_n kron B) vec(X), column-major.
        Matrix blk = Matrix::Zero(m * n, m * n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                blk.block(j * m, i * m, m, m) += a[k](i, j) * Matrix::Identity(m, m);
            }
            blk.block(i * m, i * m, m, m) -= b[k];
        }
        big.block(static_cast<Eigen::Index>(k) * m * n, 0, m * n, m * n) = blk;
    }
    Eigen::JacobiSVD<Matrix> svd(big, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double scale = std::max(1.0, sv.size() ? sv(0) : 0.0);
    std::vector<Matrix> out;
    const Matrix& v = svd.matrixV();
    for (Eigen::Index c = 0; c < m * n; ++c) {
        double s = c < sv.size() ? sv(c) : 0.0;
        if (s > tol * scale * 10) continue;
        Eigen::VectorXd col = v.col(c);
        out.push_back(Eigen::Map<Matrix>(col.data(), m, n));
    }
    return out;
}

Matrix generic_combination(const std::vector<Matrix>& basis, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.5, 1.5);
    Matrix out = Matrix::Zero(basis.front().rows(), basis.front().cols());
    for (const auto& m : basis) out += dist(rng) * m;
    return out;
}

}  // namespace

std::optional<Matrix> orthogonal_intertwiner(std::span<const Matrix> a, std::span<const Matrix> b, double tol) {
    if (a.size() != b.size() || a.empty()) return std::nullopt;
    if (a.front().rows() != b.front().rows()) return std::nullopt;
    auto space = intertwiner_space(a, b, tol);
    if (space.empty()) return std::nullopt;
    double scale = 1.0;
    for (const auto& x : a) scale = std::max(scale, x.norm());
    for (unsigned seed = 1; seed <= 3; ++seed) {
        Matrix y = generic_combination(space, seed);
        Eigen::JacobiSVD<Matrix> svd(y, Eigen::ComputeFullU | Eigen::ComputeFullV);
        if (svd.singularValues().minCoeff() < 1e-6 * svd.singularValues().maxCoeff()) continue;
        // Polar factor of an invertible intertwiner of *-representations is
        // itself an intertwiner.
        Matrix q = svd.matrixU() * svd.matrixV().transpose();
        bool ok = true;
        for (std::size_t k = 0; k < a.size() && ok; ++k) ok = (q * a[k] - b[k] * q).norm() <= tol * scale;
        if (ok) return q;
    }
    return std::nullopt;
}

std::vector<IrrepBlock> decompose(std::span<const Matrix> generators, double tol) {
    if (generators.empty()) return {};
    const Eigen::Index n = generators.front().rows();
    // Basis of the algebra.
    FloatSpan probe(tol);
    std::vector<Matrix> alg;
    std::deque<Matrix> queue;
    for (const auto& g : generators) {
        if (probe.add(g)) {
            alg.push_back(g);
            queue.push_back(g);
        }
    }
    while (!queue.empty()) {
        Matrix x = std::move(queue.front());
        queue.pop_front();
        for (const auto& g : generators) {
            for (Matrix y : {Matrix(x * g), Matrix(g * x)}) {
                double nn = y.norm();
                if (nn == 0) continue;
                y /= nn;
                if (probe.add(y)) {
                    alg.push_back(y);
                    queue.push_back(y);
                }
            }
        }
    }
    // Center: combinations of algebra elements commuting with every generator.
    const Eigen::Index d = static_cast<Eigen::Index>(alg.size());
    Matrix sys = Matrix::Zero(static_cast<Eigen::Index>(generators.size()) * n * n, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < generators.size(); ++k) {
            Matrix c = alg[i] * generators[k] - generators[k] * alg[i];
            sys.block(static_cast<Eigen::Index>(k) * n * n, i, n * n, 1) = Eigen::Map<Eigen::VectorXd>(c.data(), n * n);
        }
    }
    Eigen::JacobiSVD<Matrix> svd(sys, Eigen::ComputeFullV);
    double scale = std::max(1.0, svd.singularValues().size() ? svd.singularValues()(0) : 0.0);
    std::vector<Matrix> center;
    for (Eigen::Index c = 0; c < d; ++c) {
        double s = c < svd.singularValues().size() ? svd.singularValues()(c) : 0.0;
        if (s > 1e-7 * scale) continue;
        Matrix z = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < d; ++i) z += svd.matrixV()(i, c) * alg[i];
        center.push_back(z);
    }
    Matrix z = generic_combination(center, 7);
    z = (z + z.transpose()) / 2;
    Eigen::SelfAdjointEigenSolver<Matrix> es(z);
    const auto& ev = es.eigenvalues();
    double spread = std::max(1e-12, ev.cwiseAbs().maxCoeff());
    std::vector<IrrepBlock> out;
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && std::abs(ev(end) - ev(start)) <= 1e-6 * spread) ++end;
        Matrix q = es.eigenvectors().middleCols(start, end - start);
        std::vector<Matrix> restricted;
        for (const auto& g : generators) restricted.push_back(q.transpose() * g * q);
        const auto dim = word_closure_dimension(restricted, tol);
        const auto size = static_cast<std::size_t>(end - start);
        auto irr = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(dim))));
        if (irr == 0 || irr * irr != dim || size % irr != 0) {
            out.push_back(IrrepBlock{size, 1});  // not split over the reals
        } else {
            out.push_back(IrrepBlock{irr, size / irr});
        }
        start = end;
    }
    return out;
}

SpanBasis span_basis(std::span<const RationalVector> vectors) {
    SpanBasis out;
    ExactSpan probe;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (probe.add(vectors[i])) out.chosen.push_back(i);
    }
    const std::size_t k = out.chosen.size();
    out.gram = zero_matrix(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) out.gram[i][j] = dot(vectors[out.chosen[i]], vectors[out.chosen[j]]);
    }
    Matrix g = to_matrix(out.gram);
    Eigen::LLT<Matrix> llt(g);
    Matrix l = llt.matrixL();
    out.chol_inv = l.inverse();
    return out;
}

}  // namespace eikonal
