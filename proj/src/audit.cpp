#include "homnet/audit.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace homnet {

namespace {

struct Vec2 {
    double x, y;
};

// Wrap-aware displacement R^p(w) - w on the wall cylinder.
Vec2 displacement(const WallPoint& image, const WallPoint& w) {
    return Vec2{angle_diff(image.x, w.x), image.y - w.y};
}

double norm2(const Vec2& v) { return std::hypot(v.x, v.y); }

double wall_distance(const WallPoint& a, const WallPoint& b) {
    return std::hypot(angle_diff(a.x, b.x), a.y - b.y);
}

std::optional<WallPoint> iterate_n(const WallPoint& w, int n, const SaddleSpectrum& spec,
                                   const TransitionSpec& tspec) {
    WallPoint cur = w;
    for (int i = 0; i < n; ++i) {
        if (cur.y == 0.0) return std::nullopt;
        try {
            cur = return_map(cur, spec, tspec).point;
        } catch (const ModelError&) {
            return std::nullopt;
        }
    }
    return cur;
}

Mat2 orbit_jacobian(const WallPoint& w, int period, const SaddleSpectrum& spec,
                    const TransitionSpec& tspec) {
    Mat2 acc = Mat2::identity();
    WallPoint cur = w;
    for (int i = 0; i < period; ++i) {
        const Mat2 j = return_jacobian(cur, spec, tspec);
        Mat2 next;
        next.a11 = j.a11 * acc.a11 + j.a12 * acc.a21;
        next.a12 = j.a11 * acc.a12 + j.a12 * acc.a22;
        next.a21 = j.a21 * acc.a11 + j.a22 * acc.a21;
        next.a22 = j.a21 * acc.a12 + j.a22 * acc.a22;
        acc = next;
        cur = return_map(cur, spec, tspec).point;
    }
    return acc;
}

void multiplier_moduli(const Mat2& m, double& abs_max, double& abs_min) {
    const double tr = m.a11 + m.a22;
    const double det = m.det();
    const double disc = tr * tr - 4.0 * det;
    if (disc < 0.0) {
        abs_max = abs_min = std::sqrt(std::fabs(det));
        return;
    }
    const double root = std::sqrt(disc);
    const double l1 = std::fabs(0.5 * (tr + root));
    const double l2 = std::fabs(0.5 * (tr - root));
    abs_max = std::max(l1, l2);
    abs_min = std::min(l1, l2);
}

}  // namespace

std::uint64_t CounterRng::at(std::uint64_t index) const {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double CounterRng::uniform(std::uint64_t index, double lo, double hi) const {
    const double u = static_cast<double>(at(index) >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

double trapping_height(const SaddleSpectrum& spec, const TransitionSpec& tspec) {
    spec.validate();
    const double delta = spec.delta();
    if (delta <= 1.0) {
        throw ConfigError("trapping height exists only in the contracting regime (delta > 1)");
    }
    const double a = tspec.A.norm();
    return std::min(1.0, std::pow(a, -1.0 / (delta - 1.0)));
}

StabilityReport stability_sample(const StabilityOptions& opt, const SaddleSpectrum& spec,
                                 const TransitionSpec& tspec) {
    spec.validate();
    tspec.validate();
    StabilityReport rep;
    rep.samples = opt.samples;
    rep.seed = opt.seed;
    rep.step_counts.reserve(opt.samples);
    rep.decreasing_onset.reserve(opt.samples);
    const CounterRng rng{opt.seed};

    double steps_sum = 0.0;
    for (int i = 0; i < opt.samples; ++i) {
        const std::uint64_t base = 3ull * static_cast<std::uint64_t>(i);
        WallPoint w{rng.uniform(base, 0.0, kTwoPi), rng.uniform(base + 1, opt.y_lo, opt.y_hi)};
        if (rng.at(base + 2) & 1ull) w.y = -w.y;

        double prev_abs = std::fabs(w.y);
        double excursion = prev_abs;
        int onset = 0;
        int attracted_at = -1;
        bool escaped = false;

        if (prev_abs < opt.attract_tol) {
            attracted_at = 0;
        } else {
            WallPoint cur = w;
            for (int n = 1; n <= opt.n_max; ++n) {
                try {
                    cur = return_map(cur, spec, tspec).point;
                } catch (const StableManifoldError&) {
                    attracted_at = n;  // landed exactly on the manifold
                    break;
                } catch (const ModelError&) {
                    escaped = true;
                    break;
                }
                const double ay = std::fabs(cur.y);
                excursion = std::max(excursion, ay);
                if (ay >= prev_abs) onset = n;
                prev_abs = ay;
                if (ay < opt.attract_tol) {
                    attracted_at = n;
                    break;
                }
            }
        }

        rep.max_excursion = std::max(rep.max_excursion, excursion);
        rep.decreasing_onset.push_back(onset);
        if (escaped) {
            ++rep.escaped;
            rep.step_counts.push_back(-1);
        } else if (attracted_at >= 0) {
            ++rep.attracted;
            rep.step_counts.push_back(attracted_at);
            rep.max_steps = std::max(rep.max_steps, attracted_at);
            steps_sum += attracted_at;
        } else {
            ++rep.undecided;
            rep.step_counts.push_back(-1);
        }
    }
    rep.mean_steps = rep.attracted > 0 ? steps_sum / rep.attracted : 0.0;
    return rep;
}

ContractionProfile contraction_profile(const ContractionOptions& opt,
                                       const SaddleSpectrum& spec,
                                       const TransitionSpec& tspec) {
    spec.validate();
    tspec.validate();
    if (opt.grid < 2 || !(opt.y_lo > 0.0) || !(opt.y_hi > opt.y_lo) || opt.y_hi > 1.0) {
        throw ConfigError("contraction profile needs a log grid inside (0, 1]");
    }
    ContractionProfile prof;
    prof.y.reserve(opt.grid);
    prof.norm.reserve(opt.grid);
    const double log_lo = std::log(opt.y_lo);
    const double log_hi = std::log(opt.y_hi);
    for (int i = 0; i < opt.grid; ++i) {
        const double y = std::exp(log_lo + (log_hi - log_lo) * i / (opt.grid - 1));
        double worst = 0.0;
        for (int j = 0; j < opt.x_probes; ++j) {
            const double x = kTwoPi * j / opt.x_probes;
            worst = std::max(worst, return_jacobian(WallPoint{x, y}, spec, tspec).norm());
        }
        prof.y.push_back(y);
        prof.norm.push_back(worst);
    }
    // Least-squares slope of log norm against log y.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < opt.grid; ++i) {
        const double lx = std::log(prof.y[i]);
        const double ly = std::log(prof.norm[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = opt.grid;
    prof.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    prof.intercept = (sy - prof.slope * sx) / n;
    return prof;
}

AttractorReport periodic_orbit_search(const PeriodicSearchOptions& opt,
                                      const SaddleSpectrum& spec,
                                      const TransitionSpec& tspec) {
    spec.validate();
    tspec.validate();
    if (opt.max_period < 1 || opt.max_period > 6) {
        throw ConfigError("periodic search supports periods 1..6");
    }
    if (!(opt.y_floor > 0.0)) throw ConfigError("periodic search needs y_floor > 0");

    AttractorReport rep;
    rep.mu = tspec.mu;

    const double log_floor = std::log(opt.y_floor);
    const double log_max = std::log(opt.y_max);

    for (int period = 1; period <= opt.max_period; ++period) {
        for (int iy = 0; iy < opt.grid_y; ++iy) {
            const int half = opt.grid_y / 2;
            const int row = iy % half;
            const double ay =
                std::exp(log_floor + (log_max - log_floor) * (row + 0.5) / half);
            const double y0 = iy < half ? ay : -ay;
            for (int ix = 0; ix < opt.grid_x; ++ix) {
                const double x0 = kTwoPi * (ix + 0.5) / opt.grid_x;
                WallPoint w{x0, y0};
                auto img = iterate_n(w, period, spec, tspec);
                if (!img) continue;
                Vec2 g = displacement(*img, w);
                // A true orbit within one grid cell leaves a residual of
                // about (1 + ||DR^p||) cell sizes; everything else skips
                // the refinement.
                double gain = 1.0;
                try {
                    gain += return_jacobian(w, spec, tspec).norm();
                } catch (const ModelError&) {
                    continue;
                }
                const double cell = kTwoPi / opt.grid_x;
                if (norm2(g) > 1.6 * cell * gain) continue;

                bool ok = false;
                for (int it = 0; it < opt.newton_iters; ++it) {
                    img = iterate_n(w, period, spec, tspec);
                    if (!img) break;
                    g = displacement(*img, w);
                    if (norm2(g) < opt.converge_tol) {
                        ok = true;
                        break;
                    }
                    Mat2 dj;
                    try {
                        dj = orbit_jacobian(w, period, spec, tspec);
                    } catch (const ModelError&) {
                        break;
                    }
                    // Solve (DR^p - I) d = -g.
                    const double m11 = dj.a11 - 1.0, m12 = dj.a12;
                    const double m21 = dj.a21, m22 = dj.a22 - 1.0;
                    const double det = m11 * m22 - m12 * m21;
                    if (std::fabs(det) < 1e-14) break;
                    const double dx = (-g.x * m22 + g.y * m12) / det;
                    const double dy = (-m11 * g.y + m21 * g.x) / det;
                    double lam = 1.0;
                    bool stepped = false;
                    for (int h = 0; h < 8; ++h, lam *= 0.5) {
                        WallPoint trial{wrap_angle(w.x + lam * dx), w.y + lam * dy};
                        if (std::fabs(trial.y) < 0.05 * opt.y_floor ||
                            std::fabs(trial.y) > 1.0) {
                            continue;
                        }
                        auto timg = iterate_n(trial, period, spec, tspec);
                        if (!timg) continue;
                        if (norm2(displacement(*timg, trial)) < norm2(g)) {
                            w = trial;
                            stepped = true;
                            break;
                        }
                    }
                    if (!stepped) break;
                }
                if (!ok) continue;

                // Keep orbits fully above the floor.
                bool above = true;
                WallPoint cur = w;
                double res = norm2(g);
                for (int i = 0; i < period && above; ++i) {
                    if (std::fabs(cur.y) < opt.y_floor) above = false;
                    cur = *iterate_n(cur, 1, spec, tspec);
                }
                if (!above) continue;

                // Minimal period.
                int minimal = period;
                for (int q = 1; q < period; ++q) {
                    if (period % q != 0) continue;
                    auto qi = iterate_n(w, q, spec, tspec);
                    if (qi && norm2(displacement(*qi, w)) < 100.0 * opt.converge_tol) {
                        minimal = q;
                        break;
                    }
                }

                // Deduplicate against found orbits.
                bool dup = false;
                for (const auto& fo : rep.orbits) {
                    if (fo.period != minimal) continue;
                    WallPoint pt = fo.point;
                    for (int i = 0; i < fo.period && !dup; ++i) {
                        if (wall_distance(pt, w) < 1e-6) dup = true;
                        pt = *iterate_n(pt, 1, spec, tspec);
                    }
                    if (dup) break;
                }
                if (dup) continue;

                PeriodicOrbit orb;
                orb.period = minimal;
                orb.point = w;
                orb.residual = res;
                const Mat2 mj = orbit_jacobian(w, minimal, spec, tspec);
                multiplier_moduli(mj, orb.mult_abs_max, orb.mult_abs_min);
                orb.attracting = orb.mult_abs_max < 1.0;
                WallPoint pt = w;
                for (int i = 0; i < minimal; ++i) {
                    orb.word.push_back(symbol_char(symbol_for_side(pt.side())));
                    pt = *iterate_n(pt, 1, spec, tspec);
                }
                const WallPoint mirror = apply_symmetry(w);
                pt = w;
                orb.symmetric_self = false;
                for (int i = 0; i < minimal; ++i) {
                    if (wall_distance(pt, mirror) < 1e-6) orb.symmetric_self = true;
                    pt = *iterate_n(pt, 1, spec, tspec);
                }
                rep.orbits.push_back(orb);
            }
        }
    }
    std::sort(rep.orbits.begin(), rep.orbits.end(), [](const auto& a, const auto& b) {
        if (a.period != b.period) return a.period < b.period;
        return std::fabs(a.point.y) > std::fabs(b.point.y);
    });
    return rep;
}

std::vector<AttractorReport> attractor_scan(const AttractorScanOptions& opt,
                                            const SaddleSpectrum& spec,
                                            const TransitionSpec& tspec) {
    spec.validate();
    if (opt.mu_values.empty()) throw ConfigError("attractor scan needs mu values");

    std::vector<AttractorReport> out;
    out.reserve(opt.mu_values.size());
    for (double mu : opt.mu_values) {
        TransitionSpec ts = tspec;
        ts.mu = mu;
        ts.validate();
        AttractorReport rep;
        rep.mu = mu;

        auto settle = [&](const WallPoint& start, bool record_transient)
            -> std::optional<PeriodicOrbit> {
            std::vector<WallPoint> hist;
            hist.push_back(start);
            std::string word;
            WallPoint cur = start;
            int converged_period = 0;
            size_t converged_at = 0;
            for (int n = 1; n <= opt.transient_max && !converged_period; ++n) {
                if (cur.y == 0.0) break;
                word.push_back(symbol_char(symbol_for_side(cur.side())));
                try {
                    cur = return_map(cur, spec, ts).point;
                } catch (const ModelError&) {
                    break;
                }
                hist.push_back(cur);
                for (int p = 1; p <= opt.max_period && n - p >= 0; ++p) {
                    if (wall_distance(hist[n], hist[n - p]) < opt.converge_tol) {
                        converged_period = p;
                        converged_at = n;
                        break;
                    }
                }
            }
            if (record_transient) {
                rep.transient_word = word;
                rep.transient_switches = 0;
                for (size_t i = 1; i < word.size(); ++i) {
                    if (word[i] != word[i - 1]) ++rep.transient_switches;
                }
            }
            if (!converged_period) return std::nullopt;

            PeriodicOrbit orb;
            orb.period = converged_period;
            orb.point = hist[converged_at];
            // Minimal period within the detected cycle.
            for (int q = 1; q < converged_period; ++q) {
                if (converged_period % q != 0) continue;
                if (wall_distance(hist[converged_at], hist[converged_at - q]) <
                    100.0 * opt.converge_tol) {
                    orb.period = q;
                    break;
                }
            }
            auto img = iterate_n(orb.point, orb.period, spec, ts);
            orb.residual = img ? norm2(displacement(*img, orb.point)) : 1.0;
            const Mat2 mj = orbit_jacobian(orb.point, orb.period, spec, ts);
            multiplier_moduli(mj, orb.mult_abs_max, orb.mult_abs_min);
            orb.attracting = orb.mult_abs_max < 1.0;
            WallPoint pt = orb.point;
            const WallPoint mirror = apply_symmetry(orb.point);
            orb.symmetric_self = false;
            for (int i = 0; i < orb.period; ++i) {
                orb.word.push_back(symbol_char(symbol_for_side(pt.side())));
                if (wall_distance(pt, mirror) < 1e-6) orb.symmetric_self = true;
                pt = *iterate_n(pt, 1, spec, ts);
            }
            return orb;
        };

        auto primary = settle(opt.start, true);
        if (primary) rep.orbits.push_back(*primary);
        auto partner = settle(apply_symmetry(opt.start), false);
        if (partner) {
            bool same = false;
            for (const auto& fo : rep.orbits) {
                WallPoint pt = fo.point;
                for (int i = 0; i < fo.period && !same; ++i) {
                    if (wall_distance(pt, partner->point) < 1e-6) same = true;
                    pt = *iterate_n(pt, 1, spec, ts);
                }
            }
            if (!same) rep.orbits.push_back(*partner);
        }
        out.push_back(rep);
    }
    return out;
}

CrossingEvidence horseshoe_check(const WallRect& rect, const SaddleSpectrum& spec,
                                 const TransitionSpec& tspec, int fiber_samples) {
    spec.validate();
    tspec.validate();
    if (rect.y_lo == 0.0 || rect.y_hi == 0.0 || (rect.y_lo > 0.0) != (rect.y_hi > 0.0)) {
        throw InvalidRectangleError("rectangle band must avoid the stable manifold y = 0");
    }
    if (!(rect.x_halfwidth > 0.0) || rect.x_halfwidth * 2.0 >= kTwoPi) {
        throw InvalidRectangleError("rectangle width must lie in (0, 2*pi)");
    }
    const double band_lo = std::min(rect.y_lo, rect.y_hi);
    const double band_hi = std::max(rect.y_lo, rect.y_hi);

    CrossingEvidence ev;
    ev.rect = rect;

    struct Strip {
        double x_lo, x_hi;  // relative to rect center
        int fiber;          // 0 = lower boundary, 1 = upper
    };
    std::vector<Strip> strips;

    for (int fiber = 0; fiber < 2; ++fiber) {
        const double yf = fiber == 0 ? rect.y_lo : rect.y_hi;
        int transits = 0;
        int entry_state = 0;       // sign of the last clear position
        bool tracking = false;     // currently inside the band
        double strip_lo = 0, strip_hi = 0;
        double last_xrel = 0;
        bool have_last = false;
        for (int i = 0; i <= fiber_samples; ++i) {
            const double x =
                rect.x_center - rect.x_halfwidth + 2.0 * rect.x_halfwidth * i / fiber_samples;
            bool valid = true;
            double X = 0, Y = 0;
            try {
                const auto rr = return_map(WallPoint{wrap_angle(x), yf}, spec, tspec);
                X = rr.point.x;
                Y = rr.point.y;
            } catch (const ModelError&) {
                valid = false;
            }
            const bool in_x =
                valid && std::fabs(angle_diff(X, rect.x_center)) <= rect.x_halfwidth;
            if (!in_x) {
                entry_state = 0;
                tracking = false;
                have_last = false;
                continue;
            }
            const double xrel = angle_diff(X, rect.x_center);
            const int pos = Y > band_hi ? 1 : (Y < band_lo ? -1 : 0);
            if (pos == 0) {
                if (entry_state != 0) {
                    if (!tracking) {
                        tracking = true;
                        strip_lo = strip_hi = xrel;
                    } else {
                        strip_lo = std::min(strip_lo, xrel);
                        strip_hi = std::max(strip_hi, xrel);
                    }
                }
            } else {
                if (entry_state != 0 && pos == -entry_state) {
                    // Full vertical transversal of the band.
                    double lo = xrel, hi = xrel;
                    if (tracking) {
                        lo = std::min(strip_lo, xrel);
                        hi = std::max(strip_hi, xrel);
                    } else if (have_last) {
                        lo = std::min(last_xrel, xrel);
                        hi = std::max(last_xrel, xrel);
                    }
                    strips.push_back(Strip{lo, hi, fiber});
                    ++transits;
                }
                entry_state = pos;
                tracking = false;
            }
            last_xrel = xrel;
            have_last = true;
        }
        if (fiber == 0) {
            ev.transits_lo = transits;
        } else {
            ev.transits_hi = transits;
        }
    }

    // Two disjoint vertical strips: pair the k-th transit of each boundary
    // fiber (the image arcs of the two fibers have different radii, so the
    // strips pair by order, not by overlap) and ask for two pairs whose
    // hulls are disjoint.
    if (ev.transits_lo >= 2 && ev.transits_hi >= 2) {
        std::vector<Strip> lo_strips, hi_strips;
        for (const auto& s : strips) {
            (s.fiber == 0 ? lo_strips : hi_strips).push_back(s);
        }
        auto by_pos = [](const Strip& a, const Strip& b) { return a.x_lo < b.x_lo; };
        std::sort(lo_strips.begin(), lo_strips.end(), by_pos);
        std::sort(hi_strips.begin(), hi_strips.end(), by_pos);
        const size_t n = std::min(lo_strips.size(), hi_strips.size());
        std::vector<std::pair<double, double>> hulls;
        for (size_t k = 0; k < n; ++k) {
            hulls.push_back({std::min(lo_strips[k].x_lo, hi_strips[k].x_lo),
                             std::max(lo_strips[k].x_hi, hi_strips[k].x_hi)});
        }
        for (size_t i = 0; i < hulls.size() && !ev.two_strips; ++i) {
            for (size_t j = i + 1; j < hulls.size() && !ev.two_strips; ++j) {
                if (hulls[i].second < hulls[j].first || hulls[j].second < hulls[i].first) {
                    ev.two_strips = true;
                }
            }
        }
    }
    ev.double_crossing = ev.two_strips;
    return ev;
}

std::vector<CrossingEvidence> horseshoe_scan(const HorseshoeScanOptions& opt,
                                             const SaddleSpectrum& spec,
                                             const TransitionSpec& tspec) {
    std::vector<CrossingEvidence> out;
    out.reserve(opt.bands);
    for (int i = 0; i < opt.bands; ++i) {
        const double f = opt.bands == 1 ? 0.0 : static_cast<double>(i) / (opt.bands - 1);
        const double yb = opt.y_lo * std::pow(opt.y_hi / opt.y_lo, f);
        WallRect rect;
        rect.x_center = 0.0;
        rect.x_halfwidth = opt.x_halfwidth;
        rect.y_lo = yb;
        rect.y_hi = std::min(1.0, yb * opt.band_ratio);
        out.push_back(horseshoe_check(rect, spec, tspec));
    }
    return out;
}

}  // namespace homnet
