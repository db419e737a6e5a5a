#pragma once

#include <cmath>

#include "homnet/errors.hpp"

namespace homnet {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Reduce an angle to [0, 2*pi).
double wrap_angle(double a);

// Signed angular distance between two angles, in (-pi, pi].
double angle_diff(double a, double b);

// Eigenvalue data of the saddle-focus: -C +/- alpha*i and E, all positive.
// The standard regime has C > E (saddle index delta = C/E > 1, attracting
// network); the expanding contrast regime C <= E must be acknowledged
// explicitly via `contrast_ok`.
struct SaddleSpectrum {
    double C = 2.0;
    double E = 1.0;
    double alpha = 1.0;
    bool contrast_ok = false;

    double delta() const { return C / E; }

    // Throws HypothesisViolationError / ConfigError on invalid parameters.
    void validate() const;

    static SaddleSpectrum canonical() { return SaddleSpectrum{}; }
    static SaddleSpectrum contrast(double c, double e, double a) {
        return SaddleSpectrum{c, e, a, true};
    }
};

// Cylindrical coordinates inside the isolating block (radius 1, height 2).
struct CylinderPoint {
    double rho;    // [0, 1]
    double theta;  // mod 2*pi
    double z;      // [-1, 1]
};

enum class Side { Plus, Minus, Stable };
enum class Cap { Top, Bottom };

// A homoclinic connection label. Gamma1 exits through the top cap (entry
// angle 0 on the wall); Gamma2 = -Gamma1 exits through the bottom cap
// (entry angle pi).
enum class Symbol { Gamma1 = 1, Gamma2 = 2 };

Symbol other(Symbol s);
Symbol symbol_for_side(Side s);  // throws InternalError for Side::Stable
char symbol_char(Symbol s);      // '1' or '2'

// Point on the cylinder wall Sigma_in, chart (x, y) -> (rho=1, theta=x, z=y).
struct WallPoint {
    double x;  // angular coordinate, mod 2*pi
    double y;  // height, [-1, 1]; y = 0 is the local stable manifold circle

    Side side() const {
        if (y > 0.0) return Side::Plus;
        if (y < 0.0) return Side::Minus;
        return Side::Stable;
    }
};

// Point on an outgoing cap Sigma_out, chart (r, phi) -> (rho=r, theta=phi,
// z=+/-1). phi is kept unwrapped (a plain real, never reduced mod 2*pi) so
// that winding counts survive composition.
struct CapPoint {
    double r;
    double phi;  // unwrapped
    Cap cap;

    double u() const { return r * std::cos(phi); }
    double v() const { return r * std::sin(phi); }
};

enum class BoundaryTag {
    SigmaInPlus,
    SigmaInMinus,
    SigmaOutTop,
    SigmaOutBottom,
    Omega,
    Interior,
};

const char* to_string(BoundaryTag t);
const char* to_string(Side s);
const char* to_string(Cap c);

// Exact linearized flow: rho(t) = rho0*exp(-C t), theta(t) = theta0 + alpha*t
// (mod 2*pi), z(t) = z0*exp(E t).
CylinderPoint local_flow(const CylinderPoint& p, double t, const SaddleSpectrum& spec);

// Time of flight through the block from a wall point: (1/E) * ln(1/|y|).
// Diverges on the stable manifold; y = 0 throws StableManifoldError.
double time_of_flight(const WallPoint& w, const SaddleSpectrum& spec);

// Local map Sigma_in -> Sigma_out. For y > 0: (r, phi) = (y^delta,
// x - (alpha/E) ln y) on the top cap; y < 0 routes to the bottom cap with
// r = |y|^delta. phi comes out unwrapped. y = 0 throws StableManifoldError.
CapPoint local_map(const WallPoint& w, const SaddleSpectrum& spec);

// The Z2 action (-Id): (rho, theta, z) -> (rho, theta+pi, -z). An exact
// involution on each chart; on caps the lift is chosen (top: phi+pi,
// bottom: phi-pi) so applying it twice is the identity on the nose.
CylinderPoint apply_symmetry(const CylinderPoint& p);
WallPoint apply_symmetry(const WallPoint& w);
CapPoint apply_symmetry(const CapPoint& c);

// Classify a point of the closed block against the boundary decomposition
// wall / caps / corner circles. The circle (rho=1, z=0) classifies as
// Sigma_in (it carries the stable side tag through WallPoint::side, not an
// error), matching the convention that segments may include their stable
// endpoint. Points farther than `tol` outside the block throw
// OutOfBlockError.
BoundaryTag classify_boundary(const CylinderPoint& p, double tol = 1e-12);

}  // namespace homnet
