#pragma once

#include <optional>
#include <vector>

#include "homnet/geometry.hpp"

namespace homnet {

struct Mat2 {
    double a11 = 1.0, a12 = 0.0;
    double a21 = 0.0, a22 = 1.0;

    double det() const { return a11 * a22 - a12 * a21; }
    // Spectral (operator 2-) norm.
    double norm() const;
    void apply(double u, double v, double& out1, double& out2) const {
        out1 = a11 * u + a12 * v;
        out2 = a21 * u + a22 * v;
    }
    static Mat2 identity() { return Mat2{}; }
};

// Data of the affine flow-box transition from the top cap to the wall.
// The map is linear in Cartesian cap coordinates (u, v) = (r cos phi,
// r sin phi) centered on the unstable manifold, and lands near the wall
// entry angle of the connection. `mu` offsets the image height and measures
// the splitting of the homoclinic connection (mu = 0: intact network).
// The bottom-cap map is never specified directly: it is the conjugate of
// the top map by the Z2 action, so equivariance holds by construction.
struct TransitionSpec {
    Mat2 A = Mat2::identity();
    double mu = 0.0;
    double tau = 1.0;    // constant travel time along the connection tube
    double r_max = 1.0;  // validity radius of the flow box on the cap

    // Entry angles of the connections on the wall are fixed by convention:
    // gamma1 at 0, gamma2 at pi. They are not configurable.
    static constexpr double entry_angle_gamma1 = 0.0;
    static constexpr double entry_angle_gamma2 = kTwoPi / 2.0;

    void validate() const;  // throws ConfigError
};

// Transition Sigma_out -> Sigma_in. Throws OutsideFlowBoxError when
// r > r_max and LeftNeighbourhoodError when the image height exceeds 1.
WallPoint transition(const CapPoint& c, const TransitionSpec& tspec);

struct ReturnResult {
    WallPoint point;
    Symbol symbol;       // gamma1 if the input had y > 0, else gamma2
    double exit_phi;     // unwrapped cap angle at exit (winding bookkeeping)
    double flight_time;  // time through the block
};

// First-return map R = transition o local_map on the wall, with symbol
// emission. With A = I, mu = 0 and y > 0 the closed form is
//   x' = y^delta cos(x - (alpha/E) ln y)  (mod 2*pi)
//   y' = y^delta sin(x - (alpha/E) ln y).
ReturnResult return_map(const WallPoint& w, const SaddleSpectrum& spec,
                        const TransitionSpec& tspec);

// Exact Jacobian of the return map at w (chain rule through the local map,
// the Cartesian cap chart and the affine transition). Matches central
// finite differences.
Mat2 return_jacobian(const WallPoint& w, const SaddleSpectrum& spec,
                     const TransitionSpec& tspec);

enum class Termination { MaxSteps, HitStableManifold, LeftNeighbourhood, Underflow };
const char* to_string(Termination t);

struct OrbitStep {
    WallPoint at;        // wall point entering the block for this step
    Symbol symbol;       // connection followed on this passage
    double flight_time;  // time through the block
    double revolutions;  // unwrapped exit angle / 2*pi
};

struct OrbitRecord {
    WallPoint initial{0.0, 0.0};
    std::vector<OrbitStep> steps;
    Termination termination = Termination::MaxSteps;
    std::optional<WallPoint> final;  // unset when the orbit escaped

    std::vector<Symbol> symbols() const;
    std::string word() const;  // symbols as a digit string
};

struct IterateOptions {
    int n_max = 100;
    // |y| at or below this stops the orbit as HitStableManifold. Set to 0
    // to run until true floating-point underflow.
    double stable_tol = 1e-14;
};

OrbitRecord iterate(const WallPoint& w, const IterateOptions& opt,
                    const SaddleSpectrum& spec, const TransitionSpec& tspec);

// --- continuous-time suspension ---------------------------------------

enum class Region { Block, TubeGamma1, TubeGamma2 };
const char* to_string(Region r);

struct TrajectorySample {
    double t;
    Region region;
    // Cartesian export coordinates. Inside the block these sample the
    // closed-form flow; along a tube they interpolate the connection
    // geometrically (export only, the model spends exactly tau there).
    double px, py, pz;
};

struct SectionEvent {
    double t;
    BoundaryTag section;
    double a, b;  // (x, y) for wall events, (r, phi) for cap events
};

struct SuspendedTrajectory {
    WallPoint initial{0.0, 0.0};
    std::vector<TrajectorySample> samples;
    std::vector<SectionEvent> events;
    // Set when the orbit left the neighbourhood or reached the stable
    // manifold before the horizon.
    std::optional<Termination> stopped;
};

// Flow the trajectory of a wall point for `horizon` time units, sampling
// every `sample_dt` and logging every section crossing. Throws on invalid
// input; escapes and stable-manifold hits are recorded, not thrown.
SuspendedTrajectory suspend_orbit(const WallPoint& w, double horizon, double sample_dt,
                                  const SaddleSpectrum& spec, const TransitionSpec& tspec);

}  // namespace homnet
