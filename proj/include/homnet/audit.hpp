#pragma once

#include <cstdint>
#include <vector>

#include "homnet/global_maps.hpp"

namespace homnet {

// Counter-based deterministic RNG: sample i of a sweep depends only on
// (seed, i), so results are independent of evaluation order and worker
// count. splitmix64 finalizer.
struct CounterRng {
    std::uint64_t seed = 0;
    std::uint64_t at(std::uint64_t index) const;
    double uniform(std::uint64_t index, double lo, double hi) const;  // in [lo, hi)
};

// Largest y0 such that every orbit started with |y| < y0 keeps strictly
// shrinking heights: solves ||A|| * y^delta = y (capped at 1). Requires
// delta > 1.
double trapping_height(const SaddleSpectrum& spec, const TransitionSpec& tspec);

struct StabilityOptions {
    int samples = 10000;
    double y_lo = 1e-6;  // sample |y| range (both signs used)
    double y_hi = 0.5;
    std::uint64_t seed = 0x5eed5eed5eedULL;
    int n_max = 64;
    double attract_tol = 1e-12;  // attracted when |y| drops below this
};

struct StabilityReport {
    int samples = 0;
    int attracted = 0;
    int escaped = 0;
    int undecided = 0;
    double max_excursion = 0.0;   // largest |y| seen along any orbit
    int max_steps = 0;            // largest returns-to-attraction count
    double mean_steps = 0.0;
    std::vector<int> step_counts;         // per orbit; -1 when not attracted
    std::vector<int> decreasing_onset;    // first step from which |y| shrinks
    std::uint64_t seed = 0;
};

// Iterate a deterministic cloud of wall points and report attraction
// statistics. Escapes are counted, never thrown.
StabilityReport stability_sample(const StabilityOptions& opt, const SaddleSpectrum& spec,
                                 const TransitionSpec& tspec);

struct ContractionOptions {
    int grid = 25;  // log-spaced |y| grid points
    double y_lo = 1e-4;
    double y_hi = 0.5;
    int x_probes = 64;  // worst case over the angular coordinate
};

struct ContractionProfile {
    std::vector<double> y;
    std::vector<double> norm;  // worst-case operator norm of the Jacobian
    double slope = 0.0;        // fitted d log(norm) / d log(y); expect delta-1
    double intercept = 0.0;
};

ContractionProfile contraction_profile(const ContractionOptions& opt,
                                       const SaddleSpectrum& spec, const TransitionSpec& tspec);

struct PeriodicSearchOptions {
    int max_period = 4;   // desk scale
    double y_floor = 1e-6;
    int grid_x = 512;
    int grid_y = 512;
    double y_max = 0.5;
    int newton_iters = 60;
    double converge_tol = 1e-11;  // on ||R^p(w) - w||
    // Newton refinement only runs from seeds whose residual passes this
    // coarse prefilter; keeps the grid sweep cheap.
    double prefilter = 0.05;
};

struct PeriodicOrbit {
    int period = 0;           // minimal period
    WallPoint point{0.0, 0.0};
    std::string word;         // symbol word around the orbit
    double residual = 0.0;    // ||R^p(w) - w||
    double mult_abs_max = 0.0;  // largest multiplier modulus
    double mult_abs_min = 0.0;
    bool attracting = false;  // both multipliers inside the unit circle
    bool symmetric_self = false;  // orbit set equals its own Z2 image
};

struct AttractorReport {
    double mu = 0.0;
    std::vector<PeriodicOrbit> orbits;
    // Transient bookkeeping for scans: symbols emitted from the generic
    // start before convergence, and the number of symbol switches in it.
    std::string transient_word;
    int transient_switches = 0;
};

// Grid-seeded damped-Newton search for periodic points of the return map
// with |y| above y_floor. Reports minimal-period orbits, deduplicated and
// paired under the symmetry.
AttractorReport periodic_orbit_search(const PeriodicSearchOptions& opt,
                                      const SaddleSpectrum& spec, const TransitionSpec& tspec);

struct AttractorScanOptions {
    std::vector<double> mu_values;
    // Generic start for the transient itinerary: high on the wall so the
    // collapse visits both connections a few times before the splitting
    // offset captures the orbit.
    WallPoint start{4.88, 0.999};
    int transient_max = 200;
    int max_period = 4;
    double converge_tol = 1e-12;
};

// Sweep the splitting parameter and report the attracting periodic orbits
// of the return map at each value, with the transient itinerary of a
// generic start (the ghost visits before settling).
std::vector<AttractorReport> attractor_scan(const AttractorScanOptions& opt,
                                            const SaddleSpectrum& spec,
                                            const TransitionSpec& tspec);

// --- horseshoe evidence ---------------------------------------------------

struct WallRect {
    double x_center = 0.0;  // angular center
    double x_halfwidth = 1.5;
    double y_lo = 0.0;  // same-sign band, 0 < y_lo < y_hi <= 1 (or both < 0)
    double y_hi = 0.0;
};

struct CrossingEvidence {
    WallRect rect;
    int transits_lo = 0;  // full vertical transversals of the image of the
    int transits_hi = 0;  // lower / upper horizontal boundary fiber
    bool two_strips = false;    // transit locations split into 2 disjoint strips
    bool double_crossing = false;
};

// Topological double-crossing check: does the image of the rectangle's
// horizontal boundaries cross the rectangle in two disjoint vertical
// strips? Throws InvalidRectangleError for bands touching y = 0.
CrossingEvidence horseshoe_check(const WallRect& rect, const SaddleSpectrum& spec,
                                 const TransitionSpec& tspec, int fiber_samples = 4096);

struct HorseshoeScanOptions {
    int bands = 24;          // log-spaced y bands
    double y_lo = 1e-3;
    double y_hi = 0.3;
    double band_ratio = 4.0;  // y_hi / y_lo of each band
    double x_halfwidth = 3.0;
};

std::vector<CrossingEvidence> horseshoe_scan(const HorseshoeScanOptions& opt,
                                             const SaddleSpectrum& spec,
                                             const TransitionSpec& tspec);

}  // namespace homnet
