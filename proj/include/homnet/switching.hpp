#pragma once

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "homnet/global_maps.hpp"

namespace homnet {

using Path = std::vector<Symbol>;

Path parse_path(std::string_view digits);  // "121" -> gamma1 gamma2 gamma1
std::string format_path(const Path& p);
Path swapped_path(const Path& p);  // gamma1 <-> gamma2

// A segment on the wall: a curve beta: (0,1] -> Sigma_in with monotone
// bounded coordinates meeting the stable manifold at beta(0). Either the
// analytic vertical family beta(s) = (x0, s*y0) or a monotone sample table
// interpolated piecewise-linearly.
class Segment {
  public:
    // beta(s) = (x0, s*y0). y0 != 0 picks the side.
    static Segment vertical(double x0, double y0);
    // rows (s, x, y) with s strictly increasing in (0, 1]; x and y weakly
    // monotone, y single-signed; x_at_zero fixes beta(0) = (x_at_zero, 0).
    static Segment from_table(std::vector<std::array<double, 3>> rows, double x_at_zero);
    static Segment default_seed() { return vertical(0.0, 1.0); }

    WallPoint at(double s) const;  // s in (0, 1]
    WallPoint endpoint() const;    // beta(0), on the stable manifold
    Side side() const;
    bool analytic() const { return rows_.empty(); }
    double x0() const { return x0_; }
    double y0() const { return y0_; }
    Segment mirrored() const;  // the Z2 image, a segment on the other side

    void validate() const;  // throws InvalidSegmentError

  private:
    Segment() = default;
    double x0_ = 0.0;  // analytic: beta(s) = (x0, s*y0); table: x at s = 0
    double y0_ = 1.0;
    std::vector<std::array<double, 3>> rows_;
};

// --- spiral images ------------------------------------------------------

struct GridSpec {
    int count = 512;
    double s_min = 1e-8;  // geometric grid from s = 1 down to here
};

struct SpiralSample {
    double s;
    CapPoint point;
};

// Image of a segment under the local map, sampled toward the stable
// endpoint, with the monotonicity certificates that make it a spiral:
// the radius decreases to zero and the unwrapped angle diverges.
struct SpiralSamples {
    std::vector<SpiralSample> samples;  // s decreasing toward 0
    bool r_decreasing = false;
    bool phi_monotone_tail = false;
    double phi_span = 0.0;  // |phi(last) - phi(first)|
};

SpiralSamples segment_image(const Segment& beta, const GridSpec& grid,
                            const SaddleSpectrum& spec);

// --- crossings of the returned segment with the stable manifold ----------

struct Crossing {
    double s;           // parameter with y(R(beta(s))) = 0
    double residual;    // |y| of the image at the bisected parameter
    Side side_outward;  // side of the image on (s, previous crossing]
};

struct CrossingOptions {
    int probes_per_ring = 32;  // geometric probes per expected half-circle
    double rel_tol = 1e-15;    // bisection bracket width, relative
    int max_rings = 8192;      // scan budget
    double s_hi = 1.0;         // scan from here toward s = 0
};

// Parameters a_1 > a_2 > ... where the first return of the segment meets
// the stable manifold, bracketed on a geometric grid and bisected.
// Consecutive inter-crossing intervals map to alternating sides.
// Throws PrecisionExhaustedError (carrying the count found) when fewer
// than k_max sign changes are resolvable, and StableManifoldError if a
// probe hits y = 0 exactly in the interior.
std::vector<Crossing> find_crossings(const Segment& beta, int k_max,
                                     const SaddleSpectrum& spec, const TransitionSpec& tspec,
                                     const CrossingOptions& opt = {});

// --- admissible intervals and path realization ---------------------------

enum class RealizeMode { Nested, Reseeded };
enum class PrecisionKind { Binary64, Extended };
const char* to_string(RealizeMode m);
const char* to_string(PrecisionKind p);

struct RealizeOptions {
    RealizeMode mode = RealizeMode::Nested;
    PrecisionKind precision = PrecisionKind::Binary64;
    int mantissa_bits = 192;    // extended mode only
    int probes_per_ring = 32;
    double rel_tol = 1e-15;
    double closed_fraction = 0.8;  // emitted closed subset of the bracket
    int ring_skip = 0;      // 0 = outermost matching ring at ring_skip_depth
    int ring_skip_depth = 1;
    int max_rings = 8192;
};

struct BracketRecord {
    int depth = 0;
    Symbol symbol = Symbol::Gamma1;
    int ring_index = 0;     // 0 = outermost matching ring of its level
    double lo = 0, hi = 0;  // bracket in the level's own scan coordinate
    double seed_lo = 0, seed_hi = 0;  // mapped back to the seed parameter
    double width = 0;                 // seed-equivalent width
};

// A bracketed parameter interval on the seed together with the symbolic
// prefix it realizes. The prefix reads off the sides of the first, second,
// ... returns of seed points: the j-th symbol is the side of R^j(beta(s)).
// Witness points handed out are therefore first-return points R(beta(s)),
// whose forward itinerary starts with the prefix. Carries the continuation
// state needed by refine_once.
struct AdmissibleInterval {
    Segment seed = Segment::default_seed();
    RealizeMode mode = RealizeMode::Nested;
    PrecisionKind precision = PrecisionKind::Binary64;
    int mantissa_bits = 53;
    Path prefix;
    int depth = 0;
    double s_lo = 0.0, s_hi = 0.0;  // seed-parameter bracket of the last level
    std::vector<BracketRecord> log;

    // Continuation state (internal): affine windows selected per level and
    // the flank of the current ring, in the engine's scan coordinates.
    std::vector<std::pair<double, double>> windows;  // (base, dir) per level
    double flank_acc = 0.0, flank_start = 1.0;

    // Reproducible closed subset of the open bracket (the middle fraction).
    std::pair<double, double> closed_subset(double fraction = 0.8) const;
};

struct Realization {
    AdmissibleInterval interval;
    double seed_param = 0.0;            // s* inside every level's bracket
    WallPoint seed_point{0.0, 0.0};     // beta(s*)
    WallPoint witness{0.0, 0.0};        // R(beta(s*)); iterate prefix == path
    OrbitRecord check;                  // iterate log of the witness
    std::vector<double> widths;         // seed-equivalent width per depth
};

// Realize a finite path: bracket the level-1 crossings, then refine once
// per remaining symbol. Nested mode keeps every bracket on the original
// seed parameter (precision dies at the depth where those brackets fall
// below the seed parameter's resolution); reseeded mode re-parametrizes
// the selected half-circle each level so bisection always resolves the
// local ring, and emits the forward-constructed witness. Requires mu = 0.
Realization realize_path(const Path& path, const Segment& seed, const RealizeOptions& opt,
                         const SaddleSpectrum& spec, const TransitionSpec& tspec);

// One refinement step: bracket the next-level crossings inside the current
// interval and select the outermost subinterval matching `target`.
AdmissibleInterval refine_once(const AdmissibleInterval& current, Symbol target,
                               const RealizeOptions& opt, const SaddleSpectrum& spec,
                               const TransitionSpec& tspec);

// Consume `depth` symbols from the stream and realize the prefix. The
// midpoint of the emitted closed subset approximates an initial condition
// following the whole stream; widths per depth are strictly decreasing.
struct PrefixRealization {
    Realization realization;
    Path consumed;
    double midpoint_param = 0.0;
    WallPoint midpoint_seed_point{0.0, 0.0};
};

PrefixRealization realize_infinite_prefix(const std::function<Symbol(int)>& stream, int depth,
                                          const Segment& seed, const RealizeOptions& opt,
                                          const SaddleSpectrum& spec, const TransitionSpec& tspec);

// --- path-following verification -----------------------------------------

struct NeighbourhoodSpec {
    // Half-width (in time units) of the window around the mid-tube points
    // p_i on each connection. Must stay inside the tube: 0 < w < tau/2.
    double tube_window = 0.1;
};

struct FollowsReport {
    bool follows = false;
    std::vector<double> entry_times;    // t_j: entries into the block
    std::vector<double> visit_times;    // z_j: mid-tube visits
    std::vector<Symbol> visit_symbols;  // connection of each visit
    std::string violation;              // empty when follows
    int violation_index = -1;           // 1-based j of the first violation
};

// Check the definition of "follows": interleaved entry/visit times, visited
// connections matching the path, and a single proper block interval between
// consecutive visits. Throws InvalidNeighbourhoodsError on overlapping
// neighbourhood sizes.
FollowsReport verify_follows(const SuspendedTrajectory& traj, const Path& path,
                             const NeighbourhoodSpec& nbhd, const TransitionSpec& tspec);

}  // namespace homnet
