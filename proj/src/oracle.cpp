#include "eikonal/oracle.hpp"

#include "eikonal/log.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace eikonal {

FdGrid FdGrid::build(const MetricGraph& g, const Rational& h) {
    if (h <= 0) throw OracleError("grid step must be positive");
    FdGrid grid;
    grid.h = h;
    const double hd = to_double(h);
    for (std::size_t v = 0; v < g.vertices().size(); ++v) grid.vertex_node.push_back(grid.node_count++);
    std::vector<double> weight(grid.node_count, 0.0);
    grid.boundary.assign(grid.node_count, false);
    for (std::size_t v = 0; v < g.vertices().size(); ++v) {
        grid.boundary[v] = g.vertex(v).kind == VertexKind::boundary;
        weight[v] = hd * static_cast<double>(g.valence(v)) / 2;
    }
    grid.neighbours.assign(grid.node_count, {});
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        const auto& edge = g.edge(e);
        Rational steps = edge.length / h;
        if (denominator(steps) != 1) {
            throw OracleError("grid step " + to_string(h) + " does not divide the length of edge " + edge.id);
        }
        const auto n = static_cast<std::size_t>(numerator(steps));
        std::vector<std::size_t> nodes{grid.vertex_node[edge.tail]};
        for (std::size_t j = 1; j < n; ++j) {
            nodes.push_back(grid.node_count++);
            weight.push_back(hd);
            grid.boundary.push_back(false);
            grid.neighbours.emplace_back();
        }
        nodes.push_back(grid.vertex_node[edge.head]);
        for (std::size_t j = 0; j < n; ++j) {
            grid.neighbours[nodes[j]].push_back(nodes[j + 1]);
            grid.neighbours[nodes[j + 1]].push_back(nodes[j]);
        }
        grid.edge_nodes.push_back(std::move(nodes));
    }
    grid.weight = Eigen::Map<Eigen::VectorXd>(weight.data(), static_cast<Eigen::Index>(weight.size()));
    return grid;
}

double Pulse::at(double t) const {
    const double x = (t - onset) / (2 * h);
    return std::max(0.0, 1.0 - std::abs(x - 1.0));
}

std::vector<Eigen::VectorXd> fd_wave_solve(const MetricGraph& g, const FdGrid& grid, std::size_t gamma, const Pulse& pulse,
                                           const Rational& horizon, std::size_t stride) {
    const auto n = static_cast<Eigen::Index>(grid.node_count);
    const double hd = to_double(grid.h);
    Rational steps_r = horizon / grid.h;
    const auto steps = static_cast<std::size_t>(numerator(steps_r) / denominator(steps_r));
    std::vector<double> inv_valence(grid.node_count, 0.0);
    for (std::size_t i = 0; i < grid.node_count; ++i) {
        if (!grid.neighbours[i].empty()) inv_valence[i] = 2.0 / static_cast<double>(grid.neighbours[i].size());
    }
    (void)g;
    Eigen::VectorXd prev = Eigen::VectorXd::Zero(n), cur = Eigen::VectorXd::Zero(n), next(n);
    std::vector<Eigen::VectorXd> out{cur};
    const std::size_t source = grid.vertex_node.at(gamma);
    for (std::size_t k = 1; k <= steps; ++k) {
        for (std::size_t i = 0; i < grid.node_count; ++i) {
            if (grid.boundary[i]) {
                next[static_cast<Eigen::Index>(i)] = 0;
                continue;
            }
            double sum = 0;
            for (auto j : grid.neighbours[i]) sum += cur[static_cast<Eigen::Index>(j)];
            // edge nodes have two neighbours, so this is u_{j+1} + u_{j-1}
            next[static_cast<Eigen::Index>(i)] = inv_valence[i] * sum - prev[static_cast<Eigen::Index>(i)];
        }
        next[static_cast<Eigen::Index>(source)] = pulse.at(static_cast<double>(k) * hd);
        std::swap(prev, cur);
        std::swap(cur, next);
        if (k % stride == 0) out.push_back(cur);
    }
    return out;
}

Eigen::MatrixXd NumericEikonal::compress(const FdGrid& grid, const std::vector<Eigen::VectorXd>& windows) const {
    const auto k = static_cast<Eigen::Index>(windows.size());
    Eigen::MatrixXd a(k, static_cast<Eigen::Index>(q.size()));
    for (Eigen::Index i = 0; i < k; ++i) {
        for (std::size_t n = 0; n < q.size(); ++n) a(i, static_cast<Eigen::Index>(n)) = grid.dot(windows[static_cast<std::size_t>(i)], q[n]);
    }
    Eigen::VectorXd d(static_cast<Eigen::Index>(q.size()));
    for (std::size_t n = 0; n < q.size(); ++n) d[static_cast<Eigen::Index>(n)] = s[n] + 1;
    return a * d.asDiagonal() * a.transpose();
}

NumericEikonal numeric_eikonal(const GraphSpec& spec, const FdGrid& grid, std::size_t gamma) {
    const double hd = to_double(grid.h);
    // One solve; by time invariance the snapshot at t is the wave of the
    // pulse delayed by T - t, observed at T.
    Pulse pulse{0.0, hd};
    auto snaps = fd_wave_solve(spec.graph, grid, gamma, pulse, spec.control.horizon, 2);
    double largest = 0;
    for (const auto& w : snaps) largest = std::max(largest, std::sqrt(grid.dot(w, w)));
    NumericEikonal out;
    if (largest == 0) return out;
    for (std::size_t k = 1; k < snaps.size(); ++k) {
        Eigen::VectorXd r = snaps[k];
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : out.q) r -= grid.dot(q, r) * q;
        }
        const double rel = std::sqrt(grid.dot(r, r)) / largest;
        if (rel > 1e-7 && rel < 1e-5) ++out.ambiguous;
        if (rel <= 1e-6) continue;
        out.q.push_back(r / (rel * largest));
        // front peak of the snapshot at t = 2hk sits at depth t - 2h
        out.s.push_back(2 * hd * static_cast<double>(k - 1));
    }
    if (out.ambiguous > 0) log::warn("oracle: ", out.ambiguous, " snapshot residuals close to the rank threshold");
    return out;
}

double OracleReport::max_eigenvalue_error() const {
    double m = 0;
    for (const auto& r : rows) m = std::max(m, r.eigenvalue_error);
    return m;
}

double OracleReport::max_angle() const {
    double m = 0;
    for (const auto& r : rows) m = std::max(m, r.angle);
    return m;
}

std::string OracleReport::csv() const {
    std::ostringstream out;
    out << "family,source,r,eigenvalue_error,angle\n";
    out.precision(17);
    for (const auto& row : rows) {
        out << row.family << ',' << row.source << ',' << to_string(row.r) << ',' << row.eigenvalue_error << ','
            << row.angle << '\n';
    }
    return out.str();
}

namespace {

Eigen::MatrixXd predicted(const std::vector<EikonalTerm>& terms, std::size_t m, const Rational& r) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (const auto& t : terms) {
        auto beta = unit_scaled(t.projector.beta);
        Eigen::VectorXd b(static_cast<Eigen::Index>(m));
        for (std::size_t k = 0; k < m; ++k) b[static_cast<Eigen::Index>(k)] = to_double(beta[k]);
        out += to_double(t.tau.at(r)) * b * b.transpose() / b.squaredNorm();
    }
    return out;
}

Eigen::VectorXd window(const FdGrid& grid, const Cell& cell, const Rational& r, const Rational& half) {
    const Rational x = cell.offset_at(r);
    const auto& nodes = grid.edge_nodes.at(cell.edge);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.node_count));
    Rational lo = (x - half) / grid.h, hi = (x + half) / grid.h;
    // ceil(lo) .. floor(hi)
    auto floor_of = [](const Rational& q) {
        boost::multiprecision::mpz_int f = numerator(q) / denominator(q);
        if (q < 0 && Rational(f) != q) f -= 1;
        return static_cast<long>(f);
    };
    long a = floor_of(lo);
    if (Rational(a) < lo) ++a;
    long b = floor_of(hi);
    a = std::max(a, 0L);
    b = std::min(b, static_cast<long>(nodes.size()) - 1);
    for (long j = a; j <= b; ++j) w[static_cast<Eigen::Index>(nodes[static_cast<std::size_t>(j)])] = 1.0;
    return w / std::sqrt(grid.dot(w, w));
}

double largest_angle(const Eigen::MatrixXd& p, const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ep(p), em(m);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < ep.eigenvalues().size(); ++i) k += ep.eigenvalues()[i] > 0.5;
    if (k == 0) return 0;
    const Eigen::Index n = p.rows();
    Eigen::MatrixXd u = ep.eigenvectors().rightCols(k), v = em.eigenvectors().rightCols(k);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(u.transpose() * v);
    double c = std::clamp(svd.singularValues().minCoeff(), -1.0, 1.0);
    (void)n;
    return std::acos(c);
}

}  // namespace

OracleReport compare(const SourceParametricForm& form, const Rational& h, unsigned jobs) {
    const auto& spec = form.spec;
    FdGrid grid = FdGrid::build(spec.graph, h);
    const std::size_t sources = spec.control.sigma.size();
    std::vector<NumericEikonal> numeric(sources);
    if (jobs > 1) {
        std::vector<std::future<NumericEikonal>> futures;
        for (std::size_t s = 0; s < sources; ++s) {
            futures.push_back(std::async(std::launch::async, [&, s] { return numeric_eikonal(spec, grid, spec.control.sigma[s]); }));
        }
        for (std::size_t s = 0; s < sources; ++s) numeric[s] = futures[s].get();
    } else {
        for (std::size_t s = 0; s < sources; ++s) numeric[s] = numeric_eikonal(spec, grid, spec.control.sigma[s]);
    }
    OracleReport report;
    report.h = h;
    for (const auto& n : numeric) report.ambiguous += n.ambiguous;
    for (std::size_t j = 0; j < form.families.size(); ++j) {
        const auto& f = form.families[j];
        const Rational eps = f.family.length;
        const Rational half = eps / 8;
        for (const Rational& r : {eps / 4, eps / 2, eps * 3 / 4}) {
            std::vector<Eigen::VectorXd> windows;
            for (const auto& c : f.family.cells) windows.push_back(window(grid, c, r, half));
            for (std::size_t s = 0; s < sources; ++s) {
                Eigen::MatrixXd m = numeric[s].compress(grid, windows);
                Eigen::MatrixXd p = predicted(f.terms[s], f.family.cells.size(), r);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(m, Eigen::EigenvaluesOnly), ep(p, Eigen::EigenvaluesOnly);
                double err = (em.eigenvalues() - ep.eigenvalues()).cwiseAbs().maxCoeff();
                report.rows.push_back(ComparisonRow{j, s, r, err, largest_angle(p, m)});
            }
        }
    }
    return report;
}

}  // namespace eikonal
