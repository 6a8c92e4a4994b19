#pragma once

#include "eikonal/frames.hpp"
#include "eikonal/hydra.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace eikonal {

/// Malformed or mismatched artifact.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Artifacts are JSON objects tagged by "artifact" and carrying the graph
// description text, so every stage can be resumed from its predecessor's
// output. Rationals are "p/q" strings; floats only appear in block
// projectors (orthonormal coordinates) and are written shortest-round-trip.

std::string write_source_form(const SourceParametricForm& form);
std::string write_canonical_a(const CanonicalFormA& form);
std::string write_geometric(const GeometricForm& form);
std::string write_frame(const FrameGraph& frame);
std::string write_hydra(const GraphSpec& spec, const std::vector<std::vector<Ray>>& rays);

SourceParametricForm read_source_form(const std::string& text);
CanonicalFormA read_canonical_a(const std::string& text);
GeometricForm read_geometric(const std::string& text);
FrameGraph read_frame(const std::string& text);

/// The "artifact" tag of a JSON document.
std::string artifact_kind(const std::string& text);

/// Graphviz rendering: vertices labelled with coordinate sets, edges with
/// length and per-source tau ranges.
std::string frame_dot(const FrameGraph& frame);

}  // namespace eikonal
