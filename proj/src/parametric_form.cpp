#include "eikonal/parametric_form.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <set>

namespace eikonal {

Interval AffineTime::range(const Rational& eps) const {
    Rational a = at(0);
    Rational b = at(eps);
    return a < b ? Interval{a, b} : Interval{b, a};
}

ProjectorVec ProjectorVec::from(RationalVector beta) {
    ProjectorVec p;
    p.norm2 = dot(beta, beta);
    p.beta = std::move(beta);
    return p;
}

std::vector<std::size_t> ProjectorVec::support() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < beta.size(); ++i) {
        if (beta[i] != 0) out.push_back(i);
    }
    return out;
}

RationalMatrix ProjectorVec::matrix() const {
    RationalMatrix m = zero_matrix(beta.size(), beta.size());
    for (std::size_t i = 0; i < beta.size(); ++i) {
        if (beta[i] == 0) continue;
        for (std::size_t j = 0; j < beta.size(); ++j) m[i][j] = beta[i] * beta[j] / norm2;
    }
    return m;
}

std::size_t source_slot(const ControlConfig& control, std::size_t v) {
    auto it = std::find(control.sigma.begin(), control.sigma.end(), v);
    if (it == control.sigma.end()) throw std::invalid_argument("vertex is not controlled");
    return static_cast<std::size_t>(it - control.sigma.begin());
}

AmplitudeMatrix amplitude_matrix(const MetricGraph& g, const Family& family, std::size_t source,
                                 std::span<const ArrivalFunction> arrivals) {
    (void)g;
    const std::size_t m = family.cells.size();
    std::map<AffineTime, RationalVector> columns;
    for (std::size_t k = 0; k < m; ++k) {
        const Cell& c = family.cells[k];
        for (const auto& a : arrivals) {
            if (a.source != source || a.edge != c.edge) continue;
            if (!(a.valid.lo <= c.span.lo && c.span.hi <= a.valid.hi)) continue;
            // t along the family parameter: offset = lo + r or hi - r.
            AffineTime t{c.reversed ? -a.slope : a.slope, a.time_at(c.reversed ? c.span.hi : c.span.lo)};
            auto& col = columns[t];
            if (col.empty()) col.assign(m, Rational(0));
            col[k] += a.amplitude;
        }
    }
    Rational mid = family.length / 2;
    std::vector<std::pair<AffineTime, RationalVector>> sorted(columns.begin(), columns.end());
    std::erase_if(sorted, [](const auto& c) { return is_zero(c.second); });
    std::sort(sorted.begin(), sorted.end(), [&](const auto& x, const auto& y) {
        return x.first.at(mid) < y.first.at(mid);
    });
    AmplitudeMatrix out;
    out.a.assign(m, RationalVector(sorted.size()));
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0) {
            // Disjoint ranges keep the order fixed over the whole cell.
            const auto& prev = sorted[i - 1].first;
            const auto& cur = sorted[i].first;
            if (!(prev.range(family.length).hi <= cur.range(family.length).lo)) {
                throw PipelineError("arrival order changes inside a family");
            }
        }
        out.times.push_back(sorted[i].first);
        for (std::size_t k = 0; k < m; ++k) out.a[k][i] = sorted[i].second[k];
    }
    return out;
}

namespace {

using boost::multiprecision::mpz_int;
using IntVector = std::vector<std::pair<std::size_t, mpz_int>>;

mpz_int int_dot(const IntVector& a, const IntVector& b) {
    mpz_int sum = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
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
}

// a v - b q, dropping cancelled entries.
IntVector combine(const mpz_int& a, const IntVector& v, const mpz_int& b, const IntVector& q) {
    IntVector out;
    auto i = v.begin();
    auto j = q.begin();
    while (i != v.end() || j != q.end()) {
        if (j == q.end() || (i != v.end() && i->first < j->first)) {
            out.emplace_back(i->first, a * i->second);
            ++i;
        } else if (i == v.end() || j->first < i->first) {
            out.emplace_back(j->first, -b * j->second);
            ++j;
        } else {
            mpz_int x = a * i->second - b * j->second;
            if (x != 0) out.emplace_back(i->first, std::move(x));
            ++i;
            ++j;
        }
    }
    return out;
}

}  // namespace

std::vector<EikonalTerm> gram_schmidt_terms(const AmplitudeMatrix& m) {
    // Fraction-free: every vector is kept as a primitive integer vector, which
    // is all a projector direction needs. The basis is exactly orthogonal, so
    // <v, q> = scale * <a, q> for the running residual v = scale * a - ...;
    // the right side only touches the (short) support of the column a.
    std::vector<EikonalTerm> terms;
    struct Basis {
        IntVector q;
        mpz_int norm2;
    };
    std::vector<Basis> basis;
    const std::size_t rows = m.a.size();
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> at_row(rows);  // (basis index, position in q)
    for (std::size_t i = 0; i < m.times.size(); ++i) {
        mpz_int l = 1;
        for (std::size_t k = 0; k < rows; ++k) {
            if (m.a[k][i] != 0) l = boost::multiprecision::lcm(l, mpz_int(denominator(m.a[k][i])));
        }
        IntVector a;
        for (std::size_t k = 0; k < rows; ++k) {
            if (m.a[k][i] != 0) a.emplace_back(k, mpz_int(numerator(m.a[k][i] * Rational(l))));
        }
        if (a.empty()) continue;
        // <a, q_j> for every basis vector meeting the support of a
        std::map<std::size_t, mpz_int> overlap;
        for (const auto& [k, x] : a) {
            for (const auto& [j, pos] : at_row[k]) overlap[j] += x * basis[j].q[pos].second;
        }
        IntVector v = a;
        Rational scale = 1;  // v = scale * a - (combination of basis vectors)
        for (const auto& [j, dot_a] : overlap) {
            if (dot_a == 0) continue;
            Rational c = scale * Rational(dot_a);
            // v <- d * v - n * q with c = n / d
            mpz_int n = numerator(c), d = denominator(c);
            v = combine(basis[j].norm2 * d, v, n, basis[j].q);
            scale *= Rational(basis[j].norm2 * d);
            if (v.empty()) break;
            mpz_int g = 0;
            for (const auto& [k, x] : v) g = boost::multiprecision::gcd(g, x);
            for (auto& [k, x] : v) x /= g;
            scale /= Rational(g);
        }
        if (v.empty()) continue;
        if (v.front().second < 0) {
            for (auto& [k, x] : v) x = -x;
        }
        mpz_int norm2 = int_dot(v, v);
        RationalVector dense(rows, Rational(0));
        for (const auto& [k, x] : v) dense[k] = Rational(x);
        for (std::size_t pos = 0; pos < v.size(); ++pos) at_row[v[pos].first].emplace_back(basis.size(), pos);
        basis.push_back(Basis{std::move(v), norm2});
        const auto& t = m.times[i];
        terms.push_back(EikonalTerm{AffineTime{t.slope, t.intercept + 1}, ProjectorVec{std::move(dense), Rational(norm2)}});
    }
    return terms;
}

namespace {

std::vector<std::vector<EikonalTerm>> family_terms(const MetricGraph& g, const ControlConfig& control,
                                                   const Family& fam,
                                                   std::span<const ArrivalFunction> arrivals) {
    std::vector<std::vector<EikonalTerm>> out;
    for (auto v : control.sigma) out.push_back(gram_schmidt_terms(amplitude_matrix(g, fam, v, arrivals)));
    return out;
}

std::vector<Rational> values_at(const std::vector<std::vector<EikonalTerm>>& terms, const Rational& r) {
    std::vector<Rational> out;
    for (const auto& list : terms) {
        for (const auto& t : list) out.push_back(t.tau.at(r));
    }
    return out;
}

}  // namespace

SourceParametricForm assemble_source_form(const GraphSpec& spec, const AssembleOptions& options) {
    const auto& g = spec.graph;
    const auto& control = spec.control;

    std::vector<std::vector<Front>> per_source(control.sigma.size());
    if (options.jobs > 1) {
        std::vector<std::future<std::vector<Front>>> jobs;
        for (auto v : control.sigma) {
            jobs.push_back(std::async(std::launch::async, [&, v] { return trace_fronts(g, v, control.horizon); }));
        }
        for (std::size_t i = 0; i < jobs.size(); ++i) per_source[i] = jobs[i].get();
    } else {
        for (std::size_t i = 0; i < control.sigma.size(); ++i) {
            per_source[i] = trace_fronts(g, control.sigma[i], control.horizon);
        }
    }
    std::vector<Front> fronts;
    for (auto& list : per_source) fronts.insert(fronts.end(), list.begin(), list.end());
    auto arrivals = arrival_table(g, std::span<const Front>(fronts), control.horizon);
    auto partition = build_cells_and_families(g, control, arrivals, options.extra_cuts);

    SourceParametricForm form;
    form.spec = spec;
    form.critical = std::move(partition.critical);
    for (auto& fam : partition.families) {
        auto terms = family_terms(g, control, fam, arrivals);
        auto at_end = values_at(terms, fam.length);
        auto at_start = values_at(terms, Rational(0));
        std::sort(at_end.begin(), at_end.end(), std::greater<>());
        std::sort(at_start.begin(), at_start.end(), std::greater<>());
        if (at_end < at_start) {
            // Reading r backwards keeps the projectors and the term order.
            fam.flip();
            for (auto& list : terms) {
                for (auto& t : list) t.tau = t.tau.reversed(fam.length);
            }
        }
        form.families.push_back(FamilyForm{std::move(fam), std::move(terms)});
    }
    if (auto problems = check_source_form(form); !problems.empty()) throw PipelineError(problems.front());
    return form;
}

RationalMatrix block_matrix(std::span<const EikonalTerm> terms, std::size_t m, const Rational& r) {
    RationalMatrix out = zero_matrix(m, m);
    for (const auto& t : terms) {
        Rational tau = t.tau.at(r);
        const auto& b = t.projector.beta;
        for (std::size_t i = 0; i < m; ++i) {
            if (b[i] == 0) continue;
            for (std::size_t j = 0; j < m; ++j) out[i][j] += tau * b[i] * b[j] / t.projector.norm2;
        }
    }
    return out;
}

RationalMatrix eikonal_matrix(const SourceParametricForm& form, std::size_t family, std::size_t source,
                              const Rational& r) {
    const auto& f = form.families.at(family);
    if (r < 0 || r > f.family.length) throw std::out_of_range("parameter outside the family interval");
    return block_matrix(f.terms.at(source), f.family.cells.size(), r);
}

namespace {

using SparseVec = std::vector<std::pair<std::size_t, Rational>>;

Rational sparse_dot(const SparseVec& a, const SparseVec& b) {
    Rational sum = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
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
}

// Only pairs sharing a cell can fail to be orthogonal.
bool pairwise_orthogonal(std::span<const EikonalTerm> terms, std::size_t m) {
    std::vector<SparseVec> sparse(terms.size());
    std::vector<std::vector<std::size_t>> at_cell(m);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& b = terms[i].projector.beta;
        for (std::size_t k = 0; k < b.size() && k < m; ++k) {
            if (b[k] == 0) continue;
            sparse[i].emplace_back(k, b[k]);
            at_cell[k].push_back(i);
        }
    }
    std::set<std::pair<std::size_t, std::size_t>> done;
    for (const auto& list : at_cell) {
        for (std::size_t x = 0; x < list.size(); ++x) {
            for (std::size_t y = x + 1; y < list.size(); ++y) {
                if (!done.insert({list[x], list[y]}).second) continue;
                if (sparse_dot(sparse[list[x]], sparse[list[y]]) != 0) return false;
            }
        }
    }
    return true;
}

}  // namespace

std::vector<std::string> check_source_form(const SourceParametricForm& form) {
    std::vector<std::string> problems;
    const auto& sigma = form.spec.control.sigma;
    for (std::size_t s = 0; s < sigma.size(); ++s) {
        std::vector<Interval> ranges;
        for (std::size_t j = 0; j < form.families.size(); ++j) {
            const auto& f = form.families[j];
            const auto& terms = f.terms[s];
            for (const auto& t : terms) {
                if (t.tau.slope != 1 && t.tau.slope != -1) problems.push_back("non-unit slope");
                if (t.tau.range(f.family.length).lo < 1) problems.push_back("tau below 1");
                if (t.projector.beta.size() != f.family.cells.size() || t.projector.norm2 == 0) {
                    problems.push_back("malformed projector");
                }
                ranges.push_back(t.tau.range(f.family.length));
            }
            if (!pairwise_orthogonal(terms, f.family.cells.size())) {
                problems.push_back("non-orthogonal projectors in family " + std::to_string(j));
            }
        }
        std::sort(ranges.begin(), ranges.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        for (std::size_t a = 1; a < ranges.size(); ++a) {
            // sorted by lo, so one range reaching past the next start is enough
            if (!endpoint_only_overlap(ranges[a - 1], ranges[a])) {
                problems.push_back("overlapping tau ranges for one source");
            }
        }
    }
    return problems;
}

std::vector<Interval> tau_cover(const SourceParametricForm& form, std::size_t source) {
    std::vector<Interval> parts;
    for (const auto& f : form.families) {
        for (const auto& t : f.terms.at(source)) parts.push_back(t.tau.range(f.family.length));
    }
    return interval_union(std::move(parts));
}

}  // namespace eikonal
