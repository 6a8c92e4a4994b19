#pragma once

#include "eikonal/parametric_form.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace eikonal {

class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Uniform grid of step h on every edge; vertices are grid nodes.
struct FdGrid {
    Rational h;
    std::size_t node_count = 0;
    std::vector<std::size_t> vertex_node;                // per vertex
    std::vector<std::vector<std::size_t>> edge_nodes;    // per edge, tail to head inclusive
    std::vector<std::vector<std::size_t>> neighbours;    // per node
    std::vector<bool> boundary;                          // Dirichlet node
    Eigen::VectorXd weight;                              // quadrature weight per node

    /// Throws OracleError when h does not divide an edge length.
    static FdGrid build(const MetricGraph& g, const Rational& h);

    double dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const { return (a.array() * b.array() * weight.array()).sum(); }
};

/// Hat of total width 4h starting at `onset`; zero near its start.
struct Pulse {
    double onset = 0;
    double h = 0;
    double at(double t) const;
};

/// Leapfrog with time step h (exact on edges), Kirchhoff update at interior
/// vertices, pulse at `gamma` and zero at the other boundary vertices.
/// Returns the field at t = k * stride * h for k = 0 .. floor(T / (stride h)).
std::vector<Eigen::VectorXd> fd_wave_solve(const MetricGraph& g, const FdGrid& grid, std::size_t gamma, const Pulse& pulse,
                                           const Rational& horizon, std::size_t stride = 1);

/// E = sum (s + 1) q q^T W over the orthonormalised wave snapshots.
struct NumericEikonal {
    std::vector<Eigen::VectorXd> q;  // W-orthonormal
    std::vector<double> s;           // shell depth per direction
    std::size_t ambiguous = 0;       // residuals within a decade of the threshold

    /// <a, E b> in the weighted inner product.
    Eigen::MatrixXd compress(const FdGrid& grid, const std::vector<Eigen::VectorXd>& windows) const;
};

NumericEikonal numeric_eikonal(const GraphSpec& spec, const FdGrid& grid, std::size_t gamma);

struct ComparisonRow {
    std::size_t family = 0;
    std::size_t source = 0;  // slot in sigma
    Rational r;
    double eigenvalue_error = 0;
    double angle = 0;  // largest principal angle between the ranges
};

struct OracleReport {
    Rational h;
    std::vector<ComparisonRow> rows;
    std::size_t ambiguous = 0;
    double max_eigenvalue_error() const;
    double max_angle() const;
    /// family,source,r,eigenvalue_error,angle
    std::string csv() const;
};

/// Numeric eikonal matrices compressed to windows around the determination
/// points at r = eps/4, eps/2, 3eps/4 of every family, against the exact form.
OracleReport compare(const SourceParametricForm& form, const Rational& h, unsigned jobs = 1);

}  // namespace eikonal
