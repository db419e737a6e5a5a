// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Expected values are closed forms or independent oracles
// evaluated in place; tolerances are pinned here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "homnet/audit.hpp"
#include "homnet/cli.hpp"

using namespace homnet;

namespace {

constexpr double kPi = kTwoPi / 2.0;

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
    void note(const std::string& what) {
        if (detail.empty()) detail = what;
    }
};

// Adaptive Simpson quadrature of dt = dz / (E z) from |y| up to 1, the
// independent flight-time oracle.
double adaptive_simpson(double a, double b, double fa, double fm, double fb, double whole,
                        double tol, int depth, double E) {
    auto f = [&](double z) { return 1.0 / (E * z); };
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, E) +
           adaptive_simpson(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, E);
}

double simpson_flight_time(double y, const SaddleSpectrum& spec, int /*panels*/) {
    const double a = std::fabs(y), b = 1.0;
    auto f = [&](double z) { return 1.0 / (spec.E * z); };
    const double m = 0.5 * (a + b);
    const double whole = (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
    return adaptive_simpson(a, b, f(a), f(m), f(b), whole, 1e-13, 60, spec.E);
}

// 1. Model fidelity: local map against the time-integrated flow, flight
// time against the closed form and a quadrature oracle.
Outcome criterion_model_fidelity() {
    Outcome out;
    const auto spec = SaddleSpectrum::canonical();
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> ux(0.0, kTwoPi);
    std::uniform_real_distribution<double> ue(std::log(1e-6), 0.0);
    int checked = 0;
    for (int i = 0; i < 10000; ++i) {
        const double y = std::copysign(std::exp(ue(rng)), i % 2 ? 1.0 : -1.0);
        const WallPoint w{ux(rng), y};
        const double T = time_of_flight(w, spec);
        const double closed = std::log(1.0 / std::fabs(y)) / spec.E;
        if (T != closed) {
            out.fail("flight time differs from the closed form");
            break;
        }
        const auto cap = local_map(w, spec);
        const auto fl = local_flow(CylinderPoint{1.0, w.x, w.y}, T, spec);
        const double zt = y > 0 ? 1.0 : -1.0;
        if (std::fabs(fl.z - zt) > 1e-10) {
            out.fail("flow exit height off at |y|=" + std::to_string(std::fabs(y)));
            break;
        }
        if (std::fabs(cap.r - fl.rho) > 1e-9 * std::max(1.0, fl.rho)) {
            out.fail("exit radius mismatch");
            break;
        }
        const double theta = w.x + spec.alpha * T;
        if (std::fabs(cap.phi - theta) > 1e-9 * std::max(1.0, std::fabs(theta))) {
            out.fail("exit angle mismatch");
            break;
        }
        if (i % 200 == 0) {
            const double q = simpson_flight_time(y, spec, 2048);
            if (std::fabs(T - q) > 1e-10 * std::max(1.0, T)) {
                out.fail("flight time differs from the quadrature oracle");
                break;
            }
        }
        ++checked;
    }
    out.note(std::to_string(checked) + " wall points");
    return out;
}

// 2. Equivariance of the return map with symbol swap.
Outcome criterion_equivariance() {
    Outcome out;
    const auto spec = SaddleSpectrum::canonical();
    TransitionSpec t;
    t.A = Mat2{0.9, 0.15, -0.2, 1.05};
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> ux(0.0, kTwoPi);
    std::uniform_real_distribution<double> ue(std::log(1e-6), std::log(0.9));
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double y = std::copysign(std::exp(ue(rng)), i % 2 ? 1.0 : -1.0);
        const WallPoint w{ux(rng), y};
        const auto a = return_map(apply_symmetry(w), spec, t);
        const auto b = return_map(w, spec, t);
        const auto bm = apply_symmetry(b.point);
        worst = std::max(worst, std::hypot(angle_diff(a.point.x, bm.x), a.point.y - bm.y));
        if (a.symbol != other(b.symbol)) {
            out.fail("symbol swap violated");
            break;
        }
    }
    if (worst >= 1e-12) out.fail("max equivariance error " + format_double(worst));
    out.note("max error " + format_double(worst));
    return out;
}

// 3. Crossing law a_k = exp(-k pi E / alpha) with side alternation.
Outcome criterion_crossings() {
    Outcome out;
    const auto spec = SaddleSpectrum::canonical();
    TransitionSpec t;
    const auto cr = find_crossings(Segment::default_seed(), 6, spec, t);
    if (cr.size() != 6) {
        out.fail("expected 6 crossings");
        return out;
    }
    double worst = 0.0;
    for (int k = 1; k <= 6; ++k) {
        const double expected = std::exp(-k * kPi * spec.E / spec.alpha);
        const double rel = std::fabs(cr[k - 1].s - expected) / expected;
        worst = std::max(worst, rel);
        if (rel >= 1e-10) out.fail("a_" + std::to_string(k) + " rel err " + format_double(rel));
        const Side want = k % 2 == 1 ? Side::Plus : Side::Minus;
        if (cr[k - 1].side_outward != want) out.fail("side alternation broken at k=" + std::to_string(k));
    }
    // Alternation verified on three interior samples of each interval.
    for (int k = 0; k < 6; ++k) {
        const double hi = k == 0 ? 1.0 : cr[k - 1].s;
        const double lo = cr[k].s;
        for (double f : {0.25, 0.5, 0.75}) {
            const double s = lo + f * (hi - lo);
            const auto rr = return_map(Segment::default_seed().at(s), spec, t);
            const Side want = k % 2 == 0 ? Side::Plus : Side::Minus;
            if (rr.point.side() != want) {
                out.fail("interval side sample broken in ring " + std::to_string(k));
            }
        }
    }
    out.note("max rel err " + format_double(worst));
    return out;
}

// 4. Finite switching: every order-6 path nested, every order-10 reseeded.
Outcome criterion_finite_switching() {
    Outcome out;
    const auto spec = SaddleSpectrum::canonical();
    TransitionSpec t;

    for (int mask = 0; mask < 64; ++mask) {
        Path p;
        for (int b = 0; b < 6; ++b) {
            p.push_back((mask >> b) & 1 ? Symbol::Gamma2 : Symbol::Gamma1);
        }
        RealizeOptions opt;
        opt.mode = RealizeMode::Nested;
        try {
            const auto real = realize_path(p, Segment::default_seed(), opt, spec, t);
            if (real.check.word() != format_path(p)) {
                out.fail("nested witness mismatch on " + format_path(p));
                return out;
            }
        } catch (const std::exception& e) {
            out.fail("nested " + format_path(p) + ": " + e.what());
            return out;
        }
    }

    for (int mask = 0; mask < 1024; ++mask) {
        Path p;
        for (int b = 0; b < 10; ++b) {
            p.push_back((mask >> b) & 1 ? Symbol::Gamma2 : Symbol::Gamma1);
        }
        RealizeOptions opt;
        opt.mode = RealizeMode::Reseeded;
        try {
            const auto real = realize_path(p, Segment::default_seed(), opt, spec, t);
            if (real.check.word() != format_path(p)) {
                out.fail("reseeded witness mismatch on " + format_path(p));
                return out;
            }
        } catch (const std::exception& e) {
            out.fail("reseeded " + format_path(p) + ": " + e.what());
            return out;
        }
    }
    out.note("64 nested order-6 + 1024 reseeded order-10 paths");
    return out;
}

// 5. Infinite switching prefixes and witness multiplicity.
Outcome criterion_infinite_prefix() {
    Outcome out;
    const auto spec = SaddleSpectrum::canonical();
    TransitionSpec t;
    RealizeOptions opt;
    opt.mode = RealizeMode::Reseeded;

    for (const char* name : {"constant1", "alternating", "thue-morse"}) {
        try {
            const auto pre = realize_infinite_prefix(
                [&](int i) { return stream_symbol(name, i); }, 10, Segment::default_seed(),
                opt, spec, t);
            if (pre.realization.check.word() != format_path(pre.consumed)) {
                out.fail(std::string(name) + ": witness prefix mismatch");
            }
            for (size_t d = 1; d < pre.realization.widths.size(); ++d) {
                if (!(pre.realization.widths[d] < pre.realization.widths[d - 1])) {
                    out.fail(std::string(name) + ": widths not strictly decreasing at depth " +
                             std::to_string(d + 1));
                }
            }
        } catch (const std::exception& e) {
            out.fail(std::string(name) + ": " + e.what());
        }
    }

    // Two distinct witnesses for one order-3 path: same symbols, different
    // revolution counts.
    try {
        RealizeOptions plain;
        const auto a = realize_path(parse_path("121"), Segment::default_seed(), plain, spec, t);
        RealizeOptions skip;
        skip.ring_skip = 1;
        const auto b = realize_path(parse_path("121"), Segment::default_seed(), skip, spec, t);
        if (a.check.word() != b.check.word()) out.fail("multiplicity: symbol words differ");
        const double dr = std::fabs(a.check.steps[0].revolutions - b.check.steps[0].revolutions);
        if (dr < 0.5) out.fail("multiplicity: revolution counts too close");
        out.note("revolution gap " + format_double(dr));
    } catch (const std::exception& e) {
        out.fail(std::string("multiplicity: ") + e.what());
    }
    return out;
}

// 6. Asymptotic stability of the network at mu = 0.
Outcome criterion_stability() {
    Outcome out;
    StabilityOptions opt;
    opt.samples = 10000;
    opt.y_lo = 1e-6;
    opt.y_hi = 0.5;
    opt.attract_tol = 1e-12;
    const auto rep = stability_sample(opt, SaddleSpectrum::canonical(), TransitionSpec{});
    if (rep.attracted != rep.samples) {
        out.fail(std::to_string(rep.samples - rep.attracted) + " samples not attracted");
    }
    if (rep.escaped != 0) out.fail(std::to_string(rep.escaped) + " escapes");
    if (rep.max_steps > 7) out.fail("max returns " + std::to_string(rep.max_steps));
    out.note("10000 samples, max " + std::to_string(rep.max_steps) + " returns");
    return out;
}

// 7. Horseshoe-absence evidence plus the acknowledged contrast regime.
Outcome criterion_horseshoe_audit() {
    Outcome out;
    TransitionSpec t;

    ContractionOptions copt;
    copt.grid = 25;
    copt.y_lo = 1e-4;
    copt.y_hi = 0.1;
    const auto prof = contraction_profile(copt, SaddleSpectrum::canonical(), t);
    if (std::fabs(prof.slope - 1.0) > 0.05) {
        out.fail("contraction slope " + format_double(prof.slope));
    }

    PeriodicSearchOptions popt;
    popt.max_period = 4;
    popt.y_floor = 1e-6;
    popt.grid_x = 512;
    popt.grid_y = 512;
    const auto none = periodic_orbit_search(popt, SaddleSpectrum::canonical(), t);
    for (const auto& o : none.orbits) {
        if (o.mult_abs_max >= 1.0) out.fail("non-attracting periodic point at mu=0");
    }
    if (!none.orbits.empty()) out.fail(std::to_string(none.orbits.size()) + " orbits at mu=0");

    HorseshoeScanOptions hopt;
    const auto calm = horseshoe_scan(hopt, SaddleSpectrum::canonical(), t);
    for (const auto& ev : calm) {
        if (ev.double_crossing) out.fail("double crossing at delta > 1");
    }

    const auto contrast_spec = SaddleSpectrum::contrast(1.0, 2.0, 1.0);
    const auto cprof = contraction_profile(copt, contrast_spec, t);
    if (std::fabs(cprof.slope + 0.5) > 0.025) {
        out.fail("contrast slope " + format_double(cprof.slope));
    }
    PeriodicSearchOptions sopt = popt;
    sopt.grid_x = 192;
    sopt.grid_y = 192;
    sopt.max_period = 2;
    const auto saddles = periodic_orbit_search(sopt, contrast_spec, t);
    bool saddle = false;
    for (const auto& o : saddles.orbits) saddle = saddle || o.mult_abs_max > 1.0;
    if (!saddle) out.fail("no saddle periodic point in the contrast regime");
    const auto wild = horseshoe_scan(hopt, contrast_spec, t);
    bool crossing = false;
    for (const auto& ev : wild) crossing = crossing || ev.double_crossing;
    if (!crossing) out.fail("no double-crossing rectangle in the contrast regime");

    out.note("slope " + format_double(prof.slope) + ", contrast slope " +
             format_double(cprof.slope));
    return out;
}

// 8. One or two attracting limit cycles under splitting, with a switching
// transient.
Outcome criterion_splitting() {
    Outcome out;
    const auto spec = SaddleSpectrum::canonical();
    TransitionSpec t;
    AttractorScanOptions opt;
    opt.mu_values = {1e-3, 1e-2};
    const auto reports = attractor_scan(opt, spec, t);
    for (const auto& rep : reports) {
        if (rep.orbits.empty() || rep.orbits.size() > 2) {
            out.fail("mu=" + format_double(rep.mu) + ": " +
                     std::to_string(rep.orbits.size()) + " attractors");
            continue;
        }
        for (const auto& o : rep.orbits) {
            if (!o.attracting) out.fail("mu=" + format_double(rep.mu) + ": orbit not attracting");
        }
        bool symmetric = false;
        if (rep.orbits.size() == 1) {
            symmetric = rep.orbits[0].symmetric_self;
        } else {
            const auto m = apply_symmetry(rep.orbits[0].point);
            WallPoint pt = rep.orbits[1].point;
            TransitionSpec ts = t;
            ts.mu = rep.mu;
            for (int i = 0; i < rep.orbits[1].period; ++i) {
                if (std::hypot(angle_diff(pt.x, m.x), pt.y - m.y) < 1e-6) symmetric = true;
                pt = return_map(pt, spec, ts).point;
            }
        }
        if (!symmetric) out.fail("mu=" + format_double(rep.mu) + ": attractor set not symmetric");
        if (rep.transient_switches < 3) {
            out.fail("mu=" + format_double(rep.mu) + ": only " +
                     std::to_string(rep.transient_switches) + " transient switches");
        }
        out.note("mu=" + format_double(rep.mu) + ": " + std::to_string(rep.orbits.size()) +
                 " attractor(s), transient " + rep.transient_word.substr(0, 12));
    }
    return out;
}

// 9. The follows-verifier on a realized order-3 witness.
Outcome criterion_follows() {
    Outcome out;
    const auto spec = SaddleSpectrum::canonical();
    TransitionSpec t;
    RealizeOptions opt;
    const Path p = parse_path("121");
    const auto real = realize_path(p, Segment::default_seed(), opt, spec, t);

    double horizon = 1.0;
    for (const auto& s : real.check.steps) horizon += s.flight_time + t.tau;
    if (real.check.final && real.check.final->y != 0.0) {
        horizon += time_of_flight(*real.check.final, spec);
    }
    const auto traj = suspend_orbit(real.witness, horizon, horizon / 256.0, spec, t);
    const auto ok = verify_follows(traj, p, NeighbourhoodSpec{0.1}, t);
    if (!ok.follows) out.fail("own path rejected: " + ok.violation);
    if (ok.entry_times.size() != 4 || ok.visit_times.size() != 3) {
        out.fail("expected 4 entries and 3 visits");
    }
    const auto bad = verify_follows(traj, parse_path("111"), NeighbourhoodSpec{0.1}, t);
    if (bad.follows) out.fail("differing path accepted");
    if (bad.violation_index != 2) {
        out.fail("violation index " + std::to_string(bad.violation_index) + ", expected 2");
    }
    out.note("entries " + std::to_string(ok.entry_times.size()) + ", visits " +
             std::to_string(ok.visit_times.size()));
    return out;
}

// 10. Determinism of record streams under a fixed seed.
Outcome criterion_determinism() {
    Outcome out;
    const auto cfg = parse_config("");
    for (const char* cmd : {"crossings", "audit-stability", "realize", "map"}) {
        CommandRequest req;
        req.command = cmd;
        req.samples = 1000;
        req.path = "1211";
        std::ostringstream a, b;
        RunManifest ma, mb;
        run_command(req, cfg, a, &ma);
        run_command(req, cfg, b, &mb);
        if (a.str() != b.str() || ma.output_digest != mb.output_digest) {
            out.fail(std::string(cmd) + " not byte-identical");
        }
        if (a.str().empty()) out.fail(std::string(cmd) + " produced no records");
    }
    out.note("4 commands, byte-identical reruns");
    return out;
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        std::function<Outcome()> fn;
        double budget_s;
    };
    const std::vector<Entry> entries = {
        {"model fidelity (local map vs integrated flow)", criterion_model_fidelity, 5.0},
        {"equivariance suite (R commutes with the symmetry)", criterion_equivariance, 5.0},
        {"crossing law a_k = exp(-k pi E/alpha)", criterion_crossings, 30.0},
        {"finite switching (64 nested order-6, 1024 reseeded order-10)",
         criterion_finite_switching, 120.0},
        {"infinite prefixes (3 streams, depth 10) + multiplicity", criterion_infinite_prefix,
         60.0},
        {"asymptotic stability (10^4 samples, <= 7 returns)", criterion_stability, 30.0},
        {"horseshoe absence evidence + contrast regime", criterion_horseshoe_audit, 300.0},
        {"splitting: one or two attracting cycles", criterion_splitting, 60.0},
        {"follows-verifier end to end", criterion_follows, 30.0},
        {"determinism of record streams", criterion_determinism, 60.0},
    };

    int failures = 0;
    int index = 0;
    for (const auto& e : entries) {
        ++index;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = e.fn();
        } catch (const std::exception& ex) {
            out.pass = false;
            out.detail = std::string("exception: ") + ex.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > e.budget_s) out.fail("runtime " + std::to_string(secs) + "s over budget");
        std::printf("[%s] criterion %2d: %s%s%s (%.2fs)\n", out.pass ? "PASS" : "FAIL", index,
                    e.name, out.detail.empty() ? "" : " -- ", out.detail.c_str(), secs);
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
