#include "doctest.h"
#include "support.hpp"

#include "eikonal/algebra.hpp"

#include <random>

using namespace eikonal;
using testing_support::R;

namespace {

RationalMatrix rm(std::initializer_list<std::initializer_list<int>> rows) {
    RationalMatrix out;
    for (auto row : rows) {
        RationalVector r;
        for (int x : row) r.push_back(Rational(x));
        out.push_back(std::move(r));
    }
    return out;
}

Matrix rotation(double a) {
    Matrix m(2, 2);
    m << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return m;
}

}  // namespace

TEST_CASE("word closure dimension") {
    // diag(1,0) and the all-ones projector generate all of M_2
    std::vector<RationalMatrix> gens = {rm({{1, 0}, {0, 0}}), rm({{1, 1}, {1, 1}})};
    CHECK(word_closure_dimension(std::span<const RationalMatrix>(gens)) == 4);
    std::vector<Matrix> fg = {to_matrix(gens[0]), to_matrix(gens[1])};
    CHECK(word_closure_dimension(std::span<const Matrix>(fg)) == 4);

    // commuting diagonal generators: only the diagonal
    std::vector<RationalMatrix> diag = {rm({{1, 0, 0}, {0, 2, 0}, {0, 0, 2}})};
    CHECK(word_closure_dimension(std::span<const RationalMatrix>(diag)) == 2);
}

TEST_CASE("trace equivalence and intertwiners") {
    std::vector<RationalMatrix> a = {rm({{1, 0}, {0, 0}}), rm({{1, 1}, {1, 1}})};
    // conjugate by the swap permutation
    std::vector<RationalMatrix> b = {rm({{0, 0}, {0, 1}}), rm({{1, 1}, {1, 1}})};
    std::string why;
    CHECK(trace_equivalent(a, b, &why));
    std::vector<RationalMatrix> c = {rm({{1, 0}, {0, 0}}), rm({{2, 0}, {0, 0}})};
    CHECK_FALSE(trace_equivalent(a, c, &why));
    CHECK_FALSE(why.empty());

    std::vector<Matrix> fa = {to_matrix(a[0]), to_matrix(a[1])};
    std::vector<Matrix> fb = {to_matrix(b[0]), to_matrix(b[1])};
    auto y = orthogonal_intertwiner(fa, fb);
    REQUIRE(y);
    CHECK((*y * y->transpose() - Matrix::Identity(2, 2)).norm() < 1e-9);
    for (int k = 0; k < 2; ++k) CHECK((*y * fa[k] - fb[k] * *y).norm() < 1e-9);

    std::vector<Matrix> fc = {to_matrix(c[0]), to_matrix(c[1])};
    CHECK_FALSE(orthogonal_intertwiner(fa, fc));
}

TEST_CASE("random conjugates are intertwined") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 20; ++trial) {
        const int k = 2 + trial % 3;
        std::vector<Matrix> a;
        for (int g = 0; g < 2; ++g) {
            Matrix x(k, k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) x(i, j) = n01(rng);
            a.push_back(x + x.transpose());
        }
        Matrix q = Eigen::HouseholderQR<Matrix>(Matrix::NullaryExpr(k, k, [&] { return n01(rng); })).householderQ();
        std::vector<Matrix> b;
        for (const auto& x : a) b.push_back(q * x * q.transpose());
        auto y = orthogonal_intertwiner(a, b);
        REQUIRE(y);
        for (int g = 0; g < 2; ++g) CHECK((*y * a[g] - b[g] * *y).norm() < 1e-7);
    }
}

TEST_CASE("isotypic decomposition") {
    // M_2 acting twice (block diagonal copies) plus a one-dimensional piece
    Matrix p(5, 5), s(5, 5);
    p.setZero();
    s.setZero();
    Matrix e = to_matrix(rm({{1, 0}, {0, 0}}));
    Matrix f = to_matrix(rm({{1, 1}, {1, 1}}));
    p.block(0, 0, 2, 2) = e;
    p.block(2, 2, 2, 2) = e;
    s.block(0, 0, 2, 2) = f;
    s.block(2, 2, 2, 2) = f;
    s(4, 4) = 3;
    std::vector<Matrix> gens = {p, s};
    auto blocks = decompose(gens);
    REQUIRE(blocks.size() == 2);
    std::multiset<std::pair<std::size_t, std::size_t>> got;
    for (auto b : blocks) got.insert({b.dim, b.multiplicity});
    CHECK(got == std::multiset<std::pair<std::size_t, std::size_t>>{{1, 1}, {2, 2}});

    std::vector<Matrix> rot = {rotation(0.3) * e * rotation(0.3).transpose()};
    CHECK(decompose(rot).size() == 2);
}

TEST_CASE("span basis") {
    std::vector<RationalVector> v = {{R("1"), R("1"), R("0")}, {R("2"), R("2"), R("0")}, {R("0"), R("1"), R("1")}};
    auto sb = span_basis(v);
    CHECK(sb.chosen == std::vector<std::size_t>{0, 2});
    Matrix b(3, 2);
    b << 1, 0, 1, 1, 0, 1;
    Matrix q = b * sb.chol_inv.transpose();
    CHECK((q.transpose() * q - Matrix::Identity(2, 2)).norm() < 1e-12);
}
