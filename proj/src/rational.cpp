#include "eikonal/rational.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <stdexcept>

namespace eikonal {

namespace {

bool is_integer_literal(std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(i), s.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace

Rational parse_rational(std::string_view text) {
    auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : text.substr(slash + 1);
    if (!is_integer_literal(num) || !is_integer_literal(den) || den[0] == '-' || den[0] == '+') {
        throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    }
    boost::multiprecision::mpz_int p(std::string(num[0] == '+' ? num.substr(1) : num));
    boost::multiprecision::mpz_int q{std::string(den)};
    if (q == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return Rational(p, q);
}

std::string to_string(const Rational& value) {
    if (denominator(value) == 1) return numerator(value).str();
    return numerator(value).str() + "/" + denominator(value).str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

std::vector<Interval> interval_union(std::vector<Interval> parts) {
    std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    for (auto& p : parts) {
        if (!out.empty() && p.lo <= out.back().hi) {
            if (out.back().hi < p.hi) out.back().hi = p.hi;
        } else {
            out.push_back(std::move(p));
        }
    }
    return out;
}

bool endpoint_only_overlap(const Interval& a, const Interval& b) {
    return !(max(a.lo, b.lo) < min(a.hi, b.hi));
}

Rational dot(const RationalVector& a, const RationalVector& b) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
    }
    return s;
}

RationalVector unit_scaled(RationalVector v) {
    Rational big = 0;
    for (const auto& x : v) big = max(big, abs(x));
    if (big == 0) return v;
    // log2 of the largest entry, up to one
    long e = static_cast<long>(boost::multiprecision::msb(numerator(big))) -
             static_cast<long>(boost::multiprecision::msb(denominator(big))) + 1;
    Rational power(boost::multiprecision::mpz_int(1) << static_cast<unsigned>(std::labs(e)));
    for (auto& x : v) x = e > 0 ? Rational(x / power) : Rational(x * power);
    return v;
}

bool is_zero(const RationalVector& v) {
    return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> row_reduce(RationalMatrix& a, std::size_t columns) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < columns && row < a.size(); ++col) {
        std::size_t sel = row;
        while (sel < a.size() && a[sel][col] == 0) ++sel;
        if (sel == a.size()) continue;
        std::swap(a[sel], a[row]);
        Rational inv = 1 / a[row][col];
        for (auto& x : a[row]) {
            if (x != 0) x *= inv;
        }
        for (std::size_t r = 0; r < a.size(); ++r) {
            if (r == row || a[r][col] == 0) continue;
            Rational f = a[r][col];
            for (std::size_t c = col; c < a[row].size(); ++c) {
                if (a[row][c] != 0) a[r][c] -= f * a[row][c];
            }
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

}  // namespace

std::size_t rank(RationalMatrix rows) {
    if (rows.empty()) return 0;
    return row_reduce(rows, rows.front().size()).size();
}

std::vector<RationalVector> null_space(RationalMatrix a, std::size_t columns) {
    auto pivots = row_reduce(a, columns);
    std::vector<bool> is_pivot(columns, false);
    for (auto p : pivots) is_pivot[p] = true;
    std::vector<RationalVector> basis;
    for (std::size_t free = 0; free < columns; ++free) {
        if (is_pivot[free]) continue;
        RationalVector v(columns, Rational(0));
        v[free] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -a[i][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

RationalMatrix zero_matrix(std::size_t rows, std::size_t cols) {
    return RationalMatrix(rows, RationalVector(cols, Rational(0)));
}

RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b) {
    const std::size_t n = a.size();
    const std::size_t k = b.size();
    const std::size_t m = k == 0 ? 0 : b.front().size();
    RationalMatrix c = zero_matrix(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < k; ++l) {
            if (a[i][l] == 0) continue;
            for (std::size_t j = 0; j < m; ++j) {
                if (b[l][j] != 0) c[i][j] += a[i][l] * b[l][j];
            }
        }
    }
    return c;
}

Rational trace(const RationalMatrix& m) {
    Rational t = 0;
    for (std::size_t i = 0; i < m.size(); ++i) t += m[i][i];
    return t;
}

RationalMatrix transpose(const RationalMatrix& m) {
    if (m.empty()) return {};
    RationalMatrix t = zero_matrix(m.front().size(), m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
    }
    return t;
}

RationalMatrix inverse(const RationalMatrix& m) {
    const std::size_t n = m.size();
    RationalMatrix aug = zero_matrix(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug[i][j] = m[i][j];
        aug[i][n + i] = 1;
    }
    if (row_reduce(aug, n).size() != n) throw std::domain_error("singular matrix");
    RationalMatrix inv = zero_matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) inv[i][j] = aug[i][n + j];
    }
    return inv;
}

}  // namespace eikonal
