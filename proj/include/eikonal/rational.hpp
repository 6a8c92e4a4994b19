#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace eikonal {

/// Exact rational number. Always kept in canonical reduced form with a
/// positive denominator (GMP invariant).
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

/// Parses `p/q` or an integer literal. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// Formats as `p/q`, or `p` when the denominator is one.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

inline Rational abs(const Rational& value) { return value < 0 ? Rational(-value) : value; }

inline const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

/// Closed interval [lo, hi] with exact endpoints; lo <= hi.
struct Interval {
    Rational lo;
    Rational hi;

    Rational length() const { return hi - lo; }
    bool contains(const Rational& x) const { return lo <= x && x <= hi; }
    bool contains_open(const Rational& x) const { return lo < x && x < hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Union of closed intervals as a sorted list of disjoint, non-touching
/// intervals.
std::vector<Interval> interval_union(std::vector<Interval> parts);

/// True iff the two closed intervals share at most one endpoint.
bool endpoint_only_overlap(const Interval& a, const Interval& b);

using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>;

Rational dot(const RationalVector& a, const RationalVector& b);
bool is_zero(const RationalVector& v);

/// v times a power of two chosen so the largest entry lies in [1/2, 1):
/// same direction, safe to convert to double however large the entries.
RationalVector unit_scaled(RationalVector v);

/// Rank by exact Gaussian elimination on the rows.
std::size_t rank(RationalMatrix rows);

/// Basis of the null space {x : A x = 0} for an r x c matrix.
std::vector<RationalVector> null_space(RationalMatrix a, std::size_t columns);

RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b);
RationalMatrix zero_matrix(std::size_t rows, std::size_t cols);
Rational trace(const RationalMatrix& m);
RationalMatrix transpose(const RationalMatrix& m);
/// Inverse of a square matrix; throws std::domain_error when singular.
RationalMatrix inverse(const RationalMatrix& m);

}  // namespace eikonal
