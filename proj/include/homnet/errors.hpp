#pragma once

#include <stdexcept>
#include <string>

namespace homnet {

// Base class for every runtime failure of the model maps. The CLI maps
// subclasses onto its exit-code contract (see cli.hpp).
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input lies on the local stable manifold (y = 0): flight time is infinite.
struct StableManifoldError : ModelError {
    using ModelError::ModelError;
};

// Point is outside the closed isolating block.
struct OutOfBlockError : ModelError {
    using ModelError::ModelError;
};

// Transition image left the wall chart (|y| > 1); the orbit escaped the
// modeled neighbourhood.
struct LeftNeighbourhoodError : ModelError {
    using ModelError::ModelError;
};

// Cap point outside the validity radius of the flow-box transition map.
struct OutsideFlowBoxError : ModelError {
    using ModelError::ModelError;
};

// Segment parametrization violates monotonicity or endpoint requirements.
struct InvalidSegmentError : ModelError {
    using ModelError::ModelError;
};

// Crossing search ran out of resolvable sign changes at the current
// precision. `found` reports how many crossings were located before the
// numeric floor.
struct PrecisionExhaustedError : ModelError {
    int found;
    explicit PrecisionExhaustedError(const std::string& what, int found_count)
        : ModelError(what), found(found_count) {}
};

struct InvalidNeighbourhoodsError : ModelError {
    using ModelError::ModelError;
};

struct InvalidRectangleError : ModelError {
    using ModelError::ModelError;
};

// Configuration document is malformed or violates a structural invariant.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Spectrum parameters violate the standing hypotheses (C, E, alpha > 0 and
// C > E unless the contrast regime is explicitly acknowledged).
struct HypothesisViolationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace homnet
