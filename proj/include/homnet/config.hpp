#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "homnet/switching.hpp"

namespace homnet {

struct Tolerances {
    double bisection_rel_tol = 1e-15;
    double stable_tol = 1e-14;      // |y| treated as on the stable manifold
    double underflow_floor = 1e-300;
};

struct RunParams {
    std::uint64_t seed = 0x5eed5eed5eedULL;
    PrecisionKind precision = PrecisionKind::Binary64;
    int mantissa_bits = 192;
    double tube_window = 0.1;  // verify_follows neighbourhood half-width
    int n_max = 100;
    int probes_per_ring = 32;
};

struct RunConfig {
    SaddleSpectrum spectrum;
    TransitionSpec transition;
    Tolerances tolerances;
    RunParams run;

    void validate() const;
    // Canonical resolved form, parseable back; used for manifests/digests.
    std::string echo() const;

    RealizeOptions realize_options(RealizeMode mode) const;
    CrossingOptions crossing_options() const;
};

// Parse a sectioned key = value document with sections [spectrum],
// [transition], [tolerances], [run]. Unknown keys, malformed values and
// structural violations throw ConfigError with the key path; a spectrum
// with C <= E and no contrast acknowledgment throws
// HypothesisViolationError. An empty document yields the canonical model.
RunConfig parse_config(std::string_view text);

RunConfig load_config_file(const std::string& path);

}  // namespace homnet
