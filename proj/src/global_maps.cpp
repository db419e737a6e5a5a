#include "homnet/global_maps.hpp"

#include <cmath>
#include <limits>

namespace homnet {

double Mat2::norm() const {
    // Largest singular value via the eigenvalues of A^T A.
    const double p = a11 * a11 + a21 * a21;
    const double q = a12 * a12 + a22 * a22;
    const double c = a11 * a12 + a21 * a22;
    const double disc = std::sqrt((p - q) * (p - q) + 4.0 * c * c);
    return std::sqrt(0.5 * (p + q + disc));
}

void TransitionSpec::validate() const {
    if (A.det() == 0.0) {
        throw ConfigError("transition matrix must be invertible (det A != 0)");
    }
    if (!(tau > 0.0)) throw ConfigError("tube travel time tau must be positive");
    if (!(r_max > 0.0) || r_max > 1.0) {
        throw ConfigError("flow-box validity radius r_max must lie in (0, 1]");
    }
}

WallPoint transition(const CapPoint& c, const TransitionSpec& tspec) {
    if (c.r > tspec.r_max) {
        throw OutsideFlowBoxError("cap point outside the flow-box validity radius");
    }
    double img1, img2;
    tspec.A.apply(c.u(), c.v(), img1, img2);
    WallPoint w{0.0, 0.0};
    if (c.cap == Cap::Top) {
        w.x = wrap_angle(TransitionSpec::entry_angle_gamma1 + img1);
        w.y = tspec.mu + img2;
    } else {
        // Conjugate of the top map by the Z2 action.
        w.x = wrap_angle(TransitionSpec::entry_angle_gamma2 - img1);
        w.y = img2 - tspec.mu;
    }
    if (std::fabs(w.y) > 1.0) {
        throw LeftNeighbourhoodError("transition image left the wall chart (|y| > 1)");
    }
    return w;
}

ReturnResult return_map(const WallPoint& w, const SaddleSpectrum& spec,
                        const TransitionSpec& tspec) {
    const CapPoint c = local_map(w, spec);
    ReturnResult out;
    out.symbol = symbol_for_side(w.side());
    out.exit_phi = c.phi;
    out.flight_time = time_of_flight(w, spec);
    out.point = transition(c, tspec);
    return out;
}

Mat2 return_jacobian(const WallPoint& w, const SaddleSpectrum& spec,
                     const TransitionSpec& tspec) {
    if (w.y == 0.0) {
        throw StableManifoldError("return map Jacobian undefined on the stable manifold");
    }
    const double s = w.y > 0.0 ? 1.0 : -1.0;
    const double ay = std::fabs(w.y);
    const double delta = spec.delta();
    const double ratio = spec.alpha / spec.E;
    const double r = std::pow(ay, delta);
    const double phi = w.x - ratio * std::log(ay);
    const double cp = std::cos(phi);
    const double sp = std::sin(phi);
    const double u = r * cp;
    const double v = r * sp;
    const double drdy = s * delta * std::pow(ay, delta - 1.0);

    // d(u, v)/d(x, y) through (r, phi).
    const double du_dx = -v;
    const double dv_dx = u;
    const double du_dy = drdy * cp + v * ratio / w.y;
    const double dv_dy = drdy * sp - u * ratio / w.y;

    Mat2 j;
    j.a11 = tspec.A.a11 * du_dx + tspec.A.a12 * dv_dx;
    j.a12 = tspec.A.a11 * du_dy + tspec.A.a12 * dv_dy;
    j.a21 = tspec.A.a21 * du_dx + tspec.A.a22 * dv_dx;
    j.a22 = tspec.A.a21 * du_dy + tspec.A.a22 * dv_dy;
    if (w.y < 0.0) {
        // Bottom branch: x' = pi - (A(u,v))_1, y' = (A(u,v))_2 - mu.
        j.a11 = -j.a11;
        j.a12 = -j.a12;
    }
    return j;
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::MaxSteps: return "MaxSteps";
        case Termination::HitStableManifold: return "HitStableManifold";
        case Termination::LeftNeighbourhood: return "LeftNeighbourhood";
        case Termination::Underflow: return "Underflow";
    }
    return "?";
}

const char* to_string(Region r) {
    switch (r) {
        case Region::Block: return "V";
        case Region::TubeGamma1: return "tube1";
        case Region::TubeGamma2: return "tube2";
    }
    return "?";
}

std::vector<Symbol> OrbitRecord::symbols() const {
    std::vector<Symbol> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.symbol);
    return out;
}

std::string OrbitRecord::word() const {
    std::string out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(symbol_char(s.symbol));
    return out;
}

OrbitRecord iterate(const WallPoint& w, const IterateOptions& opt,
                    const SaddleSpectrum& spec, const TransitionSpec& tspec) {
    OrbitRecord rec;
    rec.initial = w;
    WallPoint cur = w;
    for (int n = 0; n < opt.n_max; ++n) {
        if (cur.y == 0.0 || std::fabs(cur.y) <= opt.stable_tol) {
            rec.termination = Termination::HitStableManifold;
            rec.final = cur;
            return rec;
        }
        const CapPoint cap = local_map(cur, spec);
        OrbitStep step;
        step.at = cur;
        step.symbol = symbol_for_side(cur.side());
        step.flight_time = time_of_flight(cur, spec);
        step.revolutions = cap.phi / kTwoPi;
        WallPoint next{0.0, 0.0};
        try {
            next = transition(cap, tspec);
        } catch (const ModelError&) {
            rec.steps.push_back(step);
            rec.termination = Termination::LeftNeighbourhood;
            return rec;
        }
        rec.steps.push_back(step);
        if (next.y == 0.0) {
            // Distinguish a genuine floating-point underflow of the image
            // height from an exact landing on the stable manifold.
            rec.termination = cap.r < 1e-300 ? Termination::Underflow
                                             : Termination::HitStableManifold;
            rec.final = next;
            return rec;
        }
        cur = next;
    }
    rec.termination = Termination::MaxSteps;
    rec.final = cur;
    return rec;
}

namespace {

void cartesian(const CylinderPoint& p, double& x, double& y, double& z) {
    x = p.rho * std::cos(p.theta);
    y = p.rho * std::sin(p.theta);
    z = p.z;
}

}  // namespace

SuspendedTrajectory suspend_orbit(const WallPoint& w, double horizon, double sample_dt,
                                  const SaddleSpectrum& spec, const TransitionSpec& tspec) {
    if (w.y == 0.0) {
        throw StableManifoldError("suspension from the stable manifold never exits");
    }
    if (std::fabs(w.y) > 1.0) throw OutOfBlockError("initial point outside the wall chart");
    if (!(horizon > 0.0) || !(sample_dt > 0.0)) {
        throw ConfigError("suspension requires horizon > 0 and sample_dt > 0");
    }

    SuspendedTrajectory traj;
    traj.initial = w;
    WallPoint cur = w;
    double t = 0.0;
    double next_sample = 0.0;

    while (t < horizon) {
        if (cur.y == 0.0) {
            traj.stopped = Termination::HitStableManifold;
            break;
        }
        traj.events.push_back(SectionEvent{
            t,
            cur.y > 0.0 ? BoundaryTag::SigmaInPlus : BoundaryTag::SigmaInMinus,
            cur.x, cur.y});
        const double T = time_of_flight(cur, spec);
        const CylinderPoint entry{1.0, cur.x, cur.y};
        const double t_exit = t + T;
        while (next_sample <= std::min(t_exit, horizon)) {
            const CylinderPoint p = local_flow(entry, next_sample - t, spec);
            double px, py, pz;
            cartesian(p, px, py, pz);
            traj.samples.push_back(TrajectorySample{next_sample, Region::Block, px, py, pz});
            next_sample += sample_dt;
        }
        if (t_exit > horizon) break;

        const CapPoint cap = local_map(cur, spec);
        if (std::fabs(cap.r - 1.0) <= 1e-14) {
            throw OutsideFlowBoxError("trajectory landed on the corner circle of the block");
        }
        traj.events.push_back(SectionEvent{
            t_exit,
            cap.cap == Cap::Top ? BoundaryTag::SigmaOutTop : BoundaryTag::SigmaOutBottom,
            cap.r, cap.phi});

        WallPoint next{0.0, 0.0};
        try {
            next = transition(cap, tspec);
        } catch (const ModelError&) {
            traj.stopped = Termination::LeftNeighbourhood;
            return traj;
        }

        const Region tube = cap.cap == Cap::Top ? Region::TubeGamma1 : Region::TubeGamma2;
        double ex, ey, ez, nx, ny, nz;
        cartesian(CylinderPoint{cap.r, cap.phi, cap.cap == Cap::Top ? 1.0 : -1.0}, ex, ey, ez);
        cartesian(CylinderPoint{1.0, next.x, next.y}, nx, ny, nz);
        const double t_entry = t_exit + tspec.tau;
        while (next_sample <= std::min(t_entry, horizon) && next_sample >= t_exit) {
            const double a = (next_sample - t_exit) / tspec.tau;
            traj.samples.push_back(TrajectorySample{
                next_sample, tube,
                ex + a * (nx - ex), ey + a * (ny - ey), ez + a * (nz - ez)});
            next_sample += sample_dt;
        }
        if (t_entry > horizon) break;
        cur = next;
        t = t_entry;
    }
    return traj;
}

}  // namespace homnet
