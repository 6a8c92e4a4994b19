#pragma once

#include "eikonal/hydra.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace eikonal {

/// tau(r) = intercept + slope * r with slope +1 or -1.
struct AffineTime {
    int slope = 1;
    Rational intercept;

    Rational at(const Rational& r) const { return slope > 0 ? Rational(intercept + r) : Rational(intercept - r); }
    /// The same function read backwards over [0, eps].
    AffineTime reversed(const Rational& eps) const { return AffineTime{-slope, at(eps)}; }
    /// Value range over [0, eps].
    Interval range(const Rational& eps) const;
    friend bool operator==(const AffineTime&, const AffineTime&) = default;
    friend auto operator<=>(const AffineTime& a, const AffineTime& b) {
        if (auto c = a.slope <=> b.slope; c != 0) return c;
        if (a.intercept < b.intercept) return std::strong_ordering::less;
        if (b.intercept < a.intercept) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
};

/// Rank-one projector beta beta^T / |beta|^2 kept unnormalised and exact.
struct ProjectorVec {
    RationalVector beta;
    Rational norm2;

    static ProjectorVec from(RationalVector beta);
    std::vector<std::size_t> support() const;
    RationalMatrix matrix() const;
    friend bool operator==(const ProjectorVec&, const ProjectorVec&) = default;
};

struct EikonalTerm {
    AffineTime tau;
    ProjectorVec projector;
    friend bool operator==(const EikonalTerm&, const EikonalTerm&) = default;
};

struct FamilyForm {
    Family family;
    /// terms[k] belongs to the k-th controlled vertex of the control config,
    /// ordered by tau at eps/2.
    std::vector<std::vector<EikonalTerm>> terms;
};

struct SourceParametricForm {
    GraphSpec spec;
    std::vector<FamilyForm> families;
    std::vector<GraphPoint> critical;
};

/// Affine arrival times of one source restricted to a family, as functions of
/// the family parameter, and the amplitude with which each reaches each cell.
struct AmplitudeMatrix {
    RationalMatrix a;                // cells x columns
    std::vector<AffineTime> times;   // strictly increasing at interior r
};

AmplitudeMatrix amplitude_matrix(const MetricGraph& g, const Family& family, std::size_t source,
                                 std::span<const ArrivalFunction> arrivals);

/// One term per column with a nonzero residual against the earlier columns;
/// tau = 1 + t. Residuals are scaled to primitive integer vectors with a
/// positive leading entry.
std::vector<EikonalTerm> gram_schmidt_terms(const AmplitudeMatrix& m);

struct AssembleOptions {
    std::vector<GraphPoint> extra_cuts;
    unsigned jobs = 1;
};

/// Full source form. Each family is oriented so that its largest tau value
/// sits at r = eps (ties: first cell runs along its edge). Throws
/// PipelineError when an internal invariant fails.
SourceParametricForm assemble_source_form(const GraphSpec& spec, const AssembleOptions& options = {});

/// Sum of tau_i(r) P_i for one family and one source (index into sigma).
RationalMatrix eikonal_matrix(const SourceParametricForm& form, std::size_t family, std::size_t source,
                              const Rational& r);

/// Same block read at r for an explicit term list over m cells.
RationalMatrix block_matrix(std::span<const EikonalTerm> terms, std::size_t m, const Rational& r);

/// Invariant violations (orthogonality, unit slopes, tau >= 1, endpoint-only
/// overlap of tau ranges per source). Empty when the form is sound.
std::vector<std::string> check_source_form(const SourceParametricForm& form);

/// Union of closed tau ranges for one source over all families.
std::vector<Interval> tau_cover(const SourceParametricForm& form, std::size_t source);

/// Position of vertex v in sigma.
std::size_t source_slot(const ControlConfig& control, std::size_t v);

}  // namespace eikonal
