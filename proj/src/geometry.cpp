#include "homnet/geometry.hpp"

#include <cmath>
#include <sstream>

namespace homnet {

double wrap_angle(double a) {
    double w = std::fmod(a, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w;
}

double angle_diff(double a, double b) {
    double d = std::fmod(a - b, kTwoPi);
    if (d <= -kTwoPi / 2.0) d += kTwoPi;
    if (d > kTwoPi / 2.0) d -= kTwoPi;
    return d;
}

void SaddleSpectrum::validate() const {
    if (!(C > 0.0) || !(E > 0.0) || !(alpha > 0.0)) {
        throw HypothesisViolationError(
            "saddle spectrum requires C > 0, E > 0, alpha > 0");
    }
    if (C <= E && !contrast_ok) {
        throw HypothesisViolationError(
            "saddle spectrum requires C > E (saddle index > 1); "
            "set contrast_ok to study the expanding regime");
    }
}

Symbol other(Symbol s) {
    return s == Symbol::Gamma1 ? Symbol::Gamma2 : Symbol::Gamma1;
}

Symbol symbol_for_side(Side s) {
    switch (s) {
        case Side::Plus: return Symbol::Gamma1;
        case Side::Minus: return Symbol::Gamma2;
        default: break;
    }
    throw InternalError("no symbol for a stable-manifold point");
}

char symbol_char(Symbol s) { return s == Symbol::Gamma1 ? '1' : '2'; }

const char* to_string(BoundaryTag t) {
    switch (t) {
        case BoundaryTag::SigmaInPlus: return "SigmaInPlus";
        case BoundaryTag::SigmaInMinus: return "SigmaInMinus";
        case BoundaryTag::SigmaOutTop: return "SigmaOutTop";
        case BoundaryTag::SigmaOutBottom: return "SigmaOutBottom";
        case BoundaryTag::Omega: return "Omega";
        case BoundaryTag::Interior: return "Interior";
    }
    return "?";
}

const char* to_string(Side s) {
    switch (s) {
        case Side::Plus: return "plus";
        case Side::Minus: return "minus";
        case Side::Stable: return "stable";
    }
    return "?";
}

const char* to_string(Cap c) { return c == Cap::Top ? "top" : "bottom"; }

CylinderPoint local_flow(const CylinderPoint& p, double t, const SaddleSpectrum& spec) {
    return CylinderPoint{
        p.rho * std::exp(-spec.C * t),
        wrap_angle(p.theta + spec.alpha * t),
        p.z * std::exp(spec.E * t),
    };
}

double time_of_flight(const WallPoint& w, const SaddleSpectrum& spec) {
    if (w.y == 0.0) {
        throw StableManifoldError("time of flight is infinite on the stable manifold");
    }
    return std::log(1.0 / std::fabs(w.y)) / spec.E;
}

CapPoint local_map(const WallPoint& w, const SaddleSpectrum& spec) {
    if (w.y == 0.0) {
        throw StableManifoldError("local map undefined on the stable manifold");
    }
    const double ay = std::fabs(w.y);
    const double r = std::pow(ay, spec.delta());
    const double phi = w.x - (spec.alpha / spec.E) * std::log(ay);
    return CapPoint{r, phi, w.y > 0.0 ? Cap::Top : Cap::Bottom};
}

CylinderPoint apply_symmetry(const CylinderPoint& p) {
    return CylinderPoint{p.rho, wrap_angle(p.theta + kTwoPi / 2.0), -p.z};
}

WallPoint apply_symmetry(const WallPoint& w) {
    return WallPoint{wrap_angle(w.x + kTwoPi / 2.0), -w.y};
}

CapPoint apply_symmetry(const CapPoint& c) {
    const double pi = kTwoPi / 2.0;
    // Lift chosen per cap so the action is an exact involution on the
    // unwrapped angle.
    if (c.cap == Cap::Top) return CapPoint{c.r, c.phi + pi, Cap::Bottom};
    return CapPoint{c.r, c.phi - pi, Cap::Top};
}

BoundaryTag classify_boundary(const CylinderPoint& p, double tol) {
    if (p.rho < -tol || p.rho > 1.0 + tol || std::fabs(p.z) > 1.0 + tol) {
        std::ostringstream os;
        os << "point (rho=" << p.rho << ", z=" << p.z << ") lies outside the block";
        throw OutOfBlockError(os.str());
    }
    const bool on_wall = std::fabs(p.rho - 1.0) <= tol;
    const bool on_cap = std::fabs(std::fabs(p.z) - 1.0) <= tol;
    if (on_wall && on_cap) return BoundaryTag::Omega;  // corner circles
    if (on_wall) {
        // The circle z = 0 is part of Sigma_in; the stable tag lives on
        // WallPoint::side.
        return p.z < 0.0 ? BoundaryTag::SigmaInMinus : BoundaryTag::SigmaInPlus;
    }
    if (on_cap) return p.z > 0.0 ? BoundaryTag::SigmaOutTop : BoundaryTag::SigmaOutBottom;
    return BoundaryTag::Interior;
}

}  // namespace homnet
