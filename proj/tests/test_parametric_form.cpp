#include "doctest.h"
#include "support.hpp"

#include "eikonal/parametric_form.hpp"

#include <Eigen/Dense>

using namespace eikonal;
using testing_support::load;
using testing_support::R;

namespace {

Eigen::MatrixXd to_eigen(const RationalMatrix& m) {
    Eigen::MatrixXd out(m.size(), m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) out(i, j) = to_double(m[i][j]);
    }
    return out;
}

}  // namespace

TEST_CASE("interval source form") {
    auto form = assemble_source_form(load("interval.graph"));
    REQUIRE(form.families.size() == 1);
    const auto& terms = form.families[0].terms[0];
    REQUIRE(terms.size() == 1);
    CHECK(terms[0].tau == AffineTime{1, Rational(1)});
    CHECK(terms[0].projector.beta == RationalVector{Rational(1)});
    CHECK(eikonal_matrix(form, 0, 0, R("1/2")) == RationalMatrix{{R("3/2")}});
}

TEST_CASE("3-star source form") {
    auto form = assemble_source_form(load("star3.graph"));
    REQUIRE(form.families.size() == 2);
    const auto& f0 = form.families[0];
    REQUIRE(f0.terms[0].size() == 1);
    CHECK(f0.terms[0][0].tau == AffineTime{1, Rational(1)});

    const auto& f1 = form.families[1];
    REQUIRE(f1.family.cells.size() == 3);
    // parametrised from the interior vertex outwards
    CHECK(f1.family.cells[0].reversed);
    CHECK(!f1.family.cells[1].reversed);
    const auto& t = f1.terms[0];
    REQUIRE(t.size() == 2);
    CHECK(t[0].tau == AffineTime{-1, Rational(2)});
    CHECK(t[0].projector.beta == RationalVector{Rational(1), Rational(0), Rational(0)});
    CHECK(t[1].tau == AffineTime{1, Rational(2)});
    CHECK(t[1].projector.beta == RationalVector{Rational(0), Rational(1), Rational(1)});
    CHECK(t[1].projector.norm2 == 2);

    auto e = to_eigen(eikonal_matrix(form, 1, 0, R("1/4")));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e);
    CHECK(es.eigenvalues()[0] == doctest::Approx(0.0));
    CHECK(es.eigenvalues()[1] == doctest::Approx(1.75));
    CHECK(es.eigenvalues()[2] == doctest::Approx(2.25));
    CHECK_THROWS_AS(eikonal_matrix(form, 1, 0, Rational(1)), std::out_of_range);
}

TEST_CASE("amplitude matrix of the 3-star family") {
    auto s = load("star3.graph");
    auto fronts = trace_fronts(s.graph, s.control.sigma[0], s.control.horizon);
    auto arrivals = arrival_table(s.graph, std::span<const Front>(fronts), s.control.horizon);
    auto form = assemble_source_form(s);
    auto m = amplitude_matrix(s.graph, form.families[1].family, s.control.sigma[0], arrivals);
    REQUIRE(m.times.size() == 2);
    CHECK(m.times[0] == AffineTime{-1, Rational(1)});
    CHECK(m.times[1] == AffineTime{1, Rational(1)});
    CHECK(m.a == RationalMatrix{{Rational(1), R("-1/3")}, {Rational(0), R("2/3")}, {Rational(0), R("2/3")}});
}

TEST_CASE("gram-schmidt drops dependent columns") {
    AmplitudeMatrix m;
    m.a = {{Rational(1), Rational(2)}, {Rational(1), Rational(2)}};
    m.times = {AffineTime{1, Rational(0)}, AffineTime{1, Rational(1)}};
    CHECK(gram_schmidt_terms(m).size() == 1);
    CHECK(gram_schmidt_terms(AmplitudeMatrix{}).empty());
}

TEST_CASE("two sources that never meet") {
    auto s = parse_graph("vertex g1 boundary\nvertex g2 boundary\nvertex g3 boundary\nvertex v interior\n"
                         "edge e1 g1 v 1\nedge e2 v g2 2\nedge e3 v g3 2\nsigma g1 g2\nhorizon 1/2\n");
    auto form = assemble_source_form(s);
    REQUIRE(form.families.size() == 2);
    std::size_t reached = 0;
    for (const auto& f : form.families) {
        for (const auto& list : f.terms) reached += list.size();
        // a source that does not reach the family contributes the zero block
        for (std::size_t k = 0; k < 2; ++k) {
            if (f.terms[k].empty()) CHECK(eikonal_matrix(form, &f - form.families.data(), k, Rational(0)) == RationalMatrix{{Rational(0)}});
        }
    }
    CHECK(reached == 2);
}

TEST_CASE("property: spectrum filling, orthogonality, unit slopes, PSD") {
    std::mt19937_64 rng(23);
    for (int iter = 0; iter < 40; ++iter) {
        auto s = iter % 4 == 3 ? testing_support::random_unicyclic(rng) : testing_support::random_tree(rng);
        auto form = assemble_source_form(s);
        CHECK(check_source_form(form).empty());
        auto cover = tau_cover(form, 0);
        REQUIRE(cover.size() == 1);
        CHECK(cover[0] == Interval{Rational(1), s.control.horizon + 1});
        for (std::size_t j = 0; j < form.families.size(); ++j) {
            const auto& f = form.families[j];
            if (f.family.cells.size() > 40) continue;  // dense exact matrices get slow
            for (auto r : {f.family.length / 4, f.family.length / 2, 3 * f.family.length / 4}) {
                auto e = to_eigen(eikonal_matrix(form, j, 0, r));
                CHECK((e - e.transpose()).norm() == 0.0);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e);
                for (int k = 0; k < es.eigenvalues().size(); ++k) {
                    double x = es.eigenvalues()[k];
                    CHECK((std::abs(x) < 1e-9 || (x > 1 - 1e-9 && x < to_double(s.control.horizon) + 1 + 1e-9)));
                }
            }
        }
    }
}
