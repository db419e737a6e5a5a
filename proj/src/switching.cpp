#include "homnet/switching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <boost/multiprecision/mpfr.hpp>

namespace homnet {

namespace {

using mpreal = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                             boost::multiprecision::et_off>;

// ---------------------------------------------------------------------
// Numeric kernel. The realization engine works on the intact network
// (mu = 0) in log-height coordinates (x, L = ln|y|, sign y): heights
// collapse like exp(-c 2^depth) along admissible orbits, far below any
// floating underflow threshold, while their logs and signs stay exactly
// representable. Templated so the nested construction can also run at
// extended precision.
// ---------------------------------------------------------------------

template <class Real>
struct LogHeight {
    Real L;    // ln|y|
    int sign;  // sign of y; 0 marks an exact landing on the stable manifold
};

template <class Real>
struct Kernel {
    Real E_over_alpha_pi;  // pi * E / alpha, ring period of the scan grid
    Real ratio;            // alpha / E
    Real delta;
    Real a11, a12, a21, a22;
    Real log_r_max;
    Real pi, two_pi;

    Real wrap(Real a) const {
        using std::fmod;
        Real w = fmod(a, two_pi);
        if (w < Real(0)) w += two_pi;
        return w;
    }

    // One return step in place. Returns false when the step cannot
    // continue: outside the flow-box validity radius or the image escaped
    // the wall chart.
    bool step(Real& x, LogHeight<Real>& h) const {
        using std::cos;
        using std::exp;
        using std::log;
        using std::sin;
        if (h.sign == 0) return false;
        const Real phi = x - ratio * h.L;
        const Real cp = cos(phi);
        const Real sp = sin(phi);
        const Real c1 = a11 * cp + a12 * sp;
        const Real c2 = a21 * cp + a22 * sp;
        if (delta * h.L > log_r_max) return false;
        const Real r = exp(delta * h.L);  // may flush to zero; feeds x only
        if (h.sign > 0) {
            x = wrap(r * c1);
        } else {
            x = wrap(pi - r * c1);
        }
        const Real ac2 = c2 < Real(0) ? Real(-c2) : c2;
        if (ac2 == Real(0)) {
            h.sign = 0;
            return true;
        }
        h.sign = c2 > Real(0) ? 1 : -1;
        h.L = delta * h.L + log(ac2);
        if (h.L > Real(0)) return false;  // |y| > 1, left the chart
        return true;
    }
};

template <class Real>
Kernel<Real> make_kernel(const SaddleSpectrum& spec, const TransitionSpec& tspec) {
    using std::atan;
    using std::log;
    Kernel<Real> k;
    k.pi = atan(Real(1)) * Real(4);
    k.two_pi = k.pi * Real(2);
    k.ratio = Real(spec.alpha) / Real(spec.E);
    k.delta = Real(spec.C) / Real(spec.E);
    k.E_over_alpha_pi = k.pi * Real(spec.E) / Real(spec.alpha);
    k.a11 = Real(tspec.A.a11);
    k.a12 = Real(tspec.A.a12);
    k.a21 = Real(tspec.A.a21);
    k.a22 = Real(tspec.A.a22);
    k.log_r_max = log(Real(tspec.r_max));
    return k;
}

// Seed evaluators. The double path supports arbitrary segments; extended
// precision is restricted to the analytic vertical family.
struct DoubleSeed {
    const Segment* seg;
    void operator()(const double& s, double& x, LogHeight<double>& h) const {
        const WallPoint w = seg->at(s);
        x = w.x;
        h.L = std::log(std::fabs(w.y));
        h.sign = w.y > 0 ? 1 : (w.y < 0 ? -1 : 0);
    }
};

template <class Real>
struct VerticalSeed {
    Real x0, y0;
    void operator()(const Real& s, Real& x, LogHeight<Real>& h) const {
        using std::log;
        x = x0;
        const Real y = y0 * s;
        h.L = log(y < Real(0) ? Real(-y) : y);
        h.sign = y > Real(0) ? 1 : (y < Real(0) ? -1 : 0);
    }
};

template <class Real, class Seed>
struct Engine {
    Kernel<Real> kernel;
    Seed seed;
    // Affine windows (base, dir): the scan coordinate t of the current
    // level maps to the seed parameter through their composition.
    std::vector<std::pair<Real, Real>> windows;
    Real eps;

    Real fold(Real t) const {
        Real u = t;
        for (auto it = windows.rbegin(); it != windows.rend(); ++it) {
            u = it->first + it->second * u;
        }
        return u;
    }

    std::optional<LogHeight<Real>> eval(const Real& t, int depth) const {
        Real x;
        LogHeight<Real> h;
        seed(fold(t), x, h);
        for (int i = 0; i < depth; ++i) {
            if (!kernel.step(x, h)) return std::nullopt;
        }
        return h;
    }
};

template <class Real>
struct ScanOutcome {
    std::vector<Real> crossings;  // t values, decreasing toward the edge
    std::vector<Real> residuals;  // |y| of the image at the bisected point
    bool boundary_zero = false;   // the scan start sat on the manifold
    bool floored = false;         // scan stopped at the resolution floor
};

template <class Real, class F>
std::pair<Real, Real> bisect_crossing(const F& eval, Real lo, Real hi, bool lo_positive,
                                      Real rel_tol) {
    using std::exp;
    // Invariant: the image signs at lo and hi differ; lo < hi.
    for (int it = 0; it < 400 && (hi - lo) > rel_tol * hi; ++it) {
        Real mid = (lo + hi) / Real(2);
        if (mid <= lo || mid >= hi) break;
        auto hm = eval(mid);
        if (!hm) break;
        if (hm->sign == 0) {
            lo = hi = mid;
            break;
        }
        if ((hm->sign > 0) == lo_positive) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const Real c = (lo + hi) / Real(2);
    auto hc = eval(c);
    const Real res = hc && hc->sign != 0 ? Real(exp(hc->L)) : Real(0);
    return {c, res};
}

// Scan the flank t in (0, 1] from t = 1 toward the accumulation edge t = 0
// on a geometric grid, bracketing sign changes of the image height until
// `need` crossings are found or the grid floors out.
template <class Real, class F>
ScanOutcome<Real> scan_crossings(const F& eval, int need, const Kernel<Real>& kernel,
                                 int probes_per_ring, long max_rings, Real rel_tol,
                                 Real t_floor, bool zero_is_error, Real log_boundary_tol) {
    using std::exp;
    ScanOutcome<Real> out;
    const Real g = exp(-kernel.E_over_alpha_pi / Real(probes_per_ring));
    Real t_prev = Real(1);
    std::optional<int> sign_prev;
    if (auto h0 = eval(Real(1))) {
        if (h0->sign == 0 || h0->L <= log_boundary_tol) {
            // The scan start itself sits on the stable manifold (to within
            // the image height scale); treat it as a boundary crossing.
            out.boundary_zero = true;
        } else {
            sign_prev = h0->sign;
        }
    }
    Real t = Real(1);
    const long max_probes = max_rings * probes_per_ring;
    for (long j = 0; j < max_probes && static_cast<int>(out.crossings.size()) < need; ++j) {
        t = t * g;
        if (t < t_floor) {
            out.floored = true;
            break;
        }
        auto hv = eval(t);
        if (!hv) {
            sign_prev.reset();
            t_prev = t;
            continue;
        }
        if (hv->sign == 0) {
            if (zero_is_error) {
                throw StableManifoldError("probe grid hit the stable manifold exactly");
            }
            sign_prev.reset();
            t_prev = t;
            continue;
        }
        if (sign_prev && hv->sign != *sign_prev) {
            auto [c, res] = bisect_crossing(eval, t, t_prev, hv->sign > 0, rel_tol);
            out.crossings.push_back(c);
            out.residuals.push_back(res);
        }
        sign_prev = hv->sign;
        t_prev = t;
    }
    return out;
}

template <class Real, class F>
std::optional<Side> ring_side(const F& eval, Real lo, Real hi) {
    std::optional<Side> side;
    for (double f : {0.27, 0.5, 0.73}) {
        Real t = lo + (hi - lo) * Real(f);
        auto h = eval(t);
        if (!h || h->sign == 0) return std::nullopt;
        Side s = h->sign > 0 ? Side::Plus : Side::Minus;
        if (side && *side != s) return std::nullopt;
        side = s;
    }
    return side;
}

// Sample the ring and return the parameter with the largest image height,
// plus its side.
template <class Real, class F>
bool ring_peak(const F& eval, Real lo, Real hi, int samples, Real& peak_t, Side& peak_side) {
    bool found = false;
    Real best_L = Real(0);
    for (int i = 1; i <= samples; ++i) {
        Real t = lo + (hi - lo) * Real(i) / Real(samples + 1);
        auto h = eval(t);
        if (!h || h->sign == 0) continue;
        if (!found || h->L > best_L) {
            best_L = h->L;
            peak_t = t;
            peak_side = h->sign > 0 ? Side::Plus : Side::Minus;
            found = true;
        }
    }
    return found;
}

// ---------------------------------------------------------------------
// Realization driver
// ---------------------------------------------------------------------

// Level targets: one entry per scan level. Nested mode constrains the
// side of R^j at level j to path[j-1] (one level per symbol; witnesses are
// first-return points, matching the admissible-interval semantics).
// Reseeded mode realizes the first symbol by the working seed's side and
// uses levels 1..k-1 for the remaining symbols; its witness is the seed
// point itself, which keeps the verified heights inside binary64 range for
// deep paths.
template <class Real, class Seed>
Realization run_realize(const Path& path, const Segment& seed_segment, Seed seed_fn,
                        const std::vector<std::optional<Symbol>>& level_targets,
                        const RealizeOptions& opt, const SaddleSpectrum& spec,
                        const TransitionSpec& tspec, int probes_per_ring,
                        bool witness_is_seed_point) {
    using std::ldexp;
    using std::pow;
    const int k = static_cast<int>(path.size());
    const bool nested = opt.mode == RealizeMode::Nested;
    const int bits = opt.precision == PrecisionKind::Extended ? opt.mantissa_bits : 53;

    Engine<Real, Seed> eng;
    eng.kernel = make_kernel<Real>(spec, tspec);
    eng.seed = seed_fn;
    eng.windows.push_back({Real(0), Real(1)});
    eng.eps = ldexp(Real(1), 1 - bits);

    Realization out;
    out.interval.seed = seed_segment;
    out.interval.mode = opt.mode;
    out.interval.precision = opt.precision;
    out.interval.mantissa_bits = bits;

    // Height scale of the first-return image at the scan start, for the
    // boundary-crossing tolerance of the level-1 scan (in log units).
    Real log_boundary_tol;
    {
        using std::log;
        Real sx;
        LogHeight<Real> sh;
        eng.seed(Real(1), sx, sh);
        const Real arow = (eng.kernel.a21 < Real(0) ? -eng.kernel.a21 : eng.kernel.a21) +
                          (eng.kernel.a22 < Real(0) ? -eng.kernel.a22 : eng.kernel.a22);
        log_boundary_tol = log(Real(1e-12)) + eng.kernel.delta * sh.L +
                           log(arow > Real(0) ? arow : Real(1));
    }

    double running_width = 1.0;
    const int levels = static_cast<int>(level_targets.size());

    for (int depth = 1; depth <= levels; ++depth) {
        const std::optional<Symbol> target = level_targets[depth - 1];
        const int skip = depth == opt.ring_skip_depth ? opt.ring_skip : 0;
        auto eval = [&](const Real& t) { return eng.eval(t, depth); };

        const Real t_floor = eng.eps * Real(64);
        const int need = 2 * skip + 2;
        ScanOutcome<Real> sc =
            scan_crossings(eval, need, eng.kernel, probes_per_ring, opt.max_rings,
                           Real(opt.rel_tol), t_floor, false,
                           depth == 1 ? log_boundary_tol : Real(-1e300));
        if (sc.crossings.empty()) {
            throw PrecisionExhaustedError(
                "no resolvable crossing at depth " + std::to_string(depth), depth - 1);
        }
        auto side0 = ring_side(eval, sc.crossings[0], Real(1));
        if (!side0) throw InternalError("could not certify the side of the outer ring");
        const Symbol sym0 = symbol_for_side(*side0);
        const int index = (!target || sym0 == *target ? 0 : 1) + 2 * skip;
        if (static_cast<int>(sc.crossings.size()) < index + 1) {
            throw PrecisionExhaustedError(
                "not enough resolvable crossings at depth " + std::to_string(depth),
                depth - 1);
        }
        const Real lo = sc.crossings[index];
        const Real hi = index == 0 ? Real(1) : sc.crossings[index - 1];
        auto side_sel = ring_side(eval, lo, hi);
        if (!side_sel || (target && symbol_for_side(*side_sel) != *target)) {
            throw InternalError("selected ring failed the side certification");
        }

        Real peak_t = lo;
        Side peak_side = Side::Plus;
        if (!ring_peak(eval, lo, hi, 65, peak_t, peak_side)) {
            throw InternalError("selected ring has no usable interior sample");
        }
        if (peak_side != *side_sel) {
            throw InternalError("ring peak disagrees with the certified side");
        }
        // Accumulation edge for the next level: the ring's crossing
        // boundary (the outer one when both ends are crossings).
        const Real acc = index == 0 ? lo : hi;

        // Seed-equivalent bracket.
        const Real s_a = eng.fold(lo);
        const Real s_b = eng.fold(hi);
        const Real w_real = s_b > s_a ? s_b - s_a : s_a - s_b;
        const double seed_lo = std::min(static_cast<double>(s_a), static_cast<double>(s_b));
        const double seed_hi = std::max(static_cast<double>(s_a), static_cast<double>(s_b));
        running_width *= std::fabs(static_cast<double>(hi - lo));
        const double width = nested ? static_cast<double>(w_real) : running_width;
        if (nested && opt.precision == PrecisionKind::Binary64 &&
            width < 4.0 * 2.22e-16 * seed_hi) {
            throw PrecisionExhaustedError(
                "nested bracket fell below the seed parameter resolution at depth " +
                    std::to_string(depth),
                depth - 1);
        }

        BracketRecord rec;
        rec.depth = depth;
        rec.symbol = symbol_for_side(*side_sel);
        rec.ring_index = index;
        rec.lo = static_cast<double>(lo);
        rec.hi = static_cast<double>(hi);
        rec.seed_lo = seed_lo;
        rec.seed_hi = seed_hi;
        rec.width = width;
        out.interval.log.push_back(rec);
        out.widths.push_back(width);
        out.interval.depth = depth;
        out.interval.s_lo = seed_lo;
        out.interval.s_hi = seed_hi;
        out.interval.flank_acc = static_cast<double>(acc);
        out.interval.flank_start = static_cast<double>(peak_t);

        // Fold the selected flank into the window stack: the next level
        // scans t in (0, 1] with t = 1 at the peak and t -> 0 at the edge.
        if (nested) {
            auto& w = eng.windows.back();
            const Real base = w.first + w.second * acc;
            const Real dir = w.second * (peak_t - acc);
            w = {base, dir};
        } else {
            eng.windows.push_back({acc, peak_t - acc});
        }
    }
    out.interval.prefix = path;

    // The witness parameter sits at the final peak, inside every level's
    // bracket.
    const Real s_star = eng.fold(Real(1));
    out.seed_param = static_cast<double>(s_star);
    out.interval.windows.clear();
    for (const auto& w : eng.windows) {
        out.interval.windows.push_back({static_cast<double>(w.first),
                                        static_cast<double>(w.second)});
    }

    // Certify the itinerary at working precision, walking the witness
    // chain in log-height coordinates. The check record is built from the
    // same chain: deep prefixes keep exact flight times and winding counts
    // even where the linear heights would underflow.
    {
        const int from = witness_is_seed_point ? 0 : 1;
        Real x;
        LogHeight<Real> h;
        eng.seed(s_star, x, h);
        for (int j = 0; j < from; ++j) {
            if (!eng.kernel.step(x, h)) {
                throw InternalError("witness chain left the model neighbourhood");
            }
        }
        OrbitRecord rec;
        rec.initial = WallPoint{static_cast<double>(x),
                                h.sign * std::exp(std::min(0.0, static_cast<double>(h.L)))};
        out.witness = rec.initial;
        for (int j = 0; j < k; ++j) {
            if (h.sign == 0) {
                throw InternalError("witness chain landed on the stable manifold");
            }
            const Symbol sym = h.sign > 0 ? Symbol::Gamma1 : Symbol::Gamma2;
            if (sym != path[j]) {
                throw InternalError("witness itinerary does not match the requested path");
            }
            OrbitStep step;
            step.at = WallPoint{static_cast<double>(x),
                                h.sign * std::exp(static_cast<double>(h.L))};
            step.symbol = sym;
            step.flight_time = static_cast<double>(-h.L / Real(spec.E));
            step.revolutions =
                static_cast<double>((x - eng.kernel.ratio * h.L) / eng.kernel.two_pi);
            rec.steps.push_back(step);
            if (j + 1 < k && !eng.kernel.step(x, h)) {
                throw InternalError("witness chain left the model neighbourhood");
            }
        }
        rec.termination = Termination::MaxSteps;
        rec.final = WallPoint{static_cast<double>(x),
                              h.sign * std::exp(static_cast<double>(h.L))};
        out.check = rec;
    }
    out.seed_point = seed_segment.at(std::min(1.0, std::max(out.seed_param,
                                                            std::numeric_limits<double>::min())));
    return out;
}

int extended_digits(int bits) {
    return std::max(25, static_cast<int>(bits * 0.30103) + 5);
}

}  // namespace

// ---------------------------------------------------------------------
// Paths
// ---------------------------------------------------------------------

Path parse_path(std::string_view digits) {
    Path p;
    p.reserve(digits.size());
    for (char c : digits) {
        if (c == '1') {
            p.push_back(Symbol::Gamma1);
        } else if (c == '2') {
            p.push_back(Symbol::Gamma2);
        } else {
            throw ConfigError(std::string("path symbols must be '1' or '2', got '") + c + "'");
        }
    }
    return p;
}

std::string format_path(const Path& p) {
    std::string s;
    s.reserve(p.size());
    for (Symbol sym : p) s.push_back(symbol_char(sym));
    return s;
}

Path swapped_path(const Path& p) {
    Path q;
    q.reserve(p.size());
    for (Symbol sym : p) q.push_back(other(sym));
    return q;
}

const char* to_string(RealizeMode m) {
    return m == RealizeMode::Nested ? "nested" : "reseeded";
}

const char* to_string(PrecisionKind p) {
    return p == PrecisionKind::Binary64 ? "binary64" : "extended";
}

// ---------------------------------------------------------------------
// Segment
// ---------------------------------------------------------------------

Segment Segment::vertical(double x0, double y0) {
    Segment s;
    s.x0_ = x0;
    s.y0_ = y0;
    s.validate();
    return s;
}

Segment Segment::from_table(std::vector<std::array<double, 3>> rows, double x_at_zero) {
    Segment s;
    s.rows_ = std::move(rows);
    s.x0_ = x_at_zero;
    s.y0_ = s.rows_.empty() ? 0.0 : s.rows_.back()[2];
    s.validate();
    return s;
}

void Segment::validate() const {
    if (rows_.empty()) {
        if (y0_ == 0.0 || !std::isfinite(y0_) || !std::isfinite(x0_)) {
            throw InvalidSegmentError("vertical segment needs finite x0 and y0 != 0");
        }
        if (std::fabs(y0_) > 1.0) {
            throw InvalidSegmentError("segment leaves the wall chart (|y0| > 1)");
        }
        return;
    }
    if (rows_.size() < 2) throw InvalidSegmentError("sample table needs at least two rows");
    double prev_s = 0.0;
    const double sign = rows_.front()[2] > 0 ? 1.0 : -1.0;
    const double dx = rows_.back()[1] - rows_.front()[1];
    for (size_t i = 0; i < rows_.size(); ++i) {
        const auto& r = rows_[i];
        if (!(r[0] > prev_s)) {
            throw InvalidSegmentError("sample parameters must increase strictly in (0, 1]");
        }
        prev_s = r[0];
        if (std::fabs(r[2]) > 1.0) {
            throw InvalidSegmentError("segment leaves the wall chart (|y| > 1)");
        }
        if (r[2] * sign <= 0.0) {
            throw InvalidSegmentError("segment height must keep one sign on (0, 1]");
        }
        if (i > 0) {
            if (std::fabs(rows_[i][2]) < std::fabs(rows_[i - 1][2])) {
                throw InvalidSegmentError("segment height must be monotone");
            }
            if ((rows_[i][1] - rows_[i - 1][1]) * dx < 0.0) {
                throw InvalidSegmentError("segment angle must be monotone");
            }
        }
    }
    if (rows_.back()[0] != 1.0) {
        throw InvalidSegmentError("sample tables must be parametrized on (0, 1]");
    }
}

WallPoint Segment::at(double s) const {
    if (!(s > 0.0) || s > 1.0) {
        throw InvalidSegmentError("segment parameter must lie in (0, 1]");
    }
    if (rows_.empty()) {
        return WallPoint{wrap_angle(x0_), s * y0_};
    }
    // Piecewise-linear through (0, x_at_zero, 0) and the table rows.
    double s0 = 0.0, x0 = x0_, y0 = 0.0;
    for (const auto& r : rows_) {
        if (s <= r[0]) {
            const double f = (s - s0) / (r[0] - s0);
            return WallPoint{wrap_angle(x0 + f * (r[1] - x0)), y0 + f * (r[2] - y0)};
        }
        s0 = r[0];
        x0 = r[1];
        y0 = r[2];
    }
    return WallPoint{wrap_angle(rows_.back()[1]), rows_.back()[2]};
}

WallPoint Segment::endpoint() const { return WallPoint{wrap_angle(x0_), 0.0}; }

Side Segment::side() const {
    const double y = rows_.empty() ? y0_ : rows_.front()[2];
    return y > 0 ? Side::Plus : Side::Minus;
}

Segment Segment::mirrored() const {
    const double pi = kTwoPi / 2.0;
    if (rows_.empty()) return vertical(x0_ + pi, -y0_);
    auto rows = rows_;
    for (auto& r : rows) {
        r[1] += pi;
        r[2] = -r[2];
    }
    return from_table(std::move(rows), x0_ + pi);
}

// ---------------------------------------------------------------------
// Spiral image
// ---------------------------------------------------------------------

SpiralSamples segment_image(const Segment& beta, const GridSpec& grid,
                            const SaddleSpectrum& spec) {
    beta.validate();
    if (grid.count < 8 || !(grid.s_min > 0.0) || grid.s_min >= 1.0) {
        throw ConfigError("segment_image grid needs count >= 8 and s_min in (0, 1)");
    }
    SpiralSamples out;
    out.samples.reserve(grid.count);
    for (int i = 0; i < grid.count; ++i) {
        const double s = std::pow(grid.s_min, static_cast<double>(i) / (grid.count - 1));
        out.samples.push_back(SpiralSample{s, local_map(beta.at(s), spec)});
    }
    out.r_decreasing = true;
    for (size_t i = 1; i < out.samples.size(); ++i) {
        if (out.samples[i].point.r > out.samples[i - 1].point.r * (1.0 + 1e-12)) {
            out.r_decreasing = false;
            break;
        }
    }
    out.phi_monotone_tail = true;
    const size_t half = out.samples.size() / 2;
    for (size_t i = half + 1; i + 1 < out.samples.size(); ++i) {
        const double d0 = out.samples[i].point.phi - out.samples[i - 1].point.phi;
        const double d1 = out.samples[i + 1].point.phi - out.samples[i].point.phi;
        if (d0 * d1 < 0.0) {
            out.phi_monotone_tail = false;
            break;
        }
    }
    out.phi_span = std::fabs(out.samples.back().point.phi - out.samples.front().point.phi);
    return out;
}

// ---------------------------------------------------------------------
// Crossings
// ---------------------------------------------------------------------

std::vector<Crossing> find_crossings(const Segment& beta, int k_max,
                                     const SaddleSpectrum& spec, const TransitionSpec& tspec,
                                     const CrossingOptions& opt) {
    beta.validate();
    spec.validate();
    tspec.validate();
    if (k_max < 1) throw ConfigError("find_crossings needs k_max >= 1");

    Engine<double, DoubleSeed> eng;
    eng.kernel = make_kernel<double>(spec, tspec);
    eng.seed = DoubleSeed{&beta};
    eng.windows.push_back({0.0, opt.s_hi});
    eng.eps = std::numeric_limits<double>::epsilon();

    auto eval = [&](const double& t) { return eng.eval(t, 1); };
    const double arow = std::fabs(tspec.A.a21) + std::fabs(tspec.A.a22);
    const double log_end_scale = std::log(1e-12) +
                                 spec.delta() * std::log(std::fabs(beta.at(opt.s_hi).y)) +
                                 (arow > 0 ? std::log(arow) : 0.0);
    ScanOutcome<double> sc =
        scan_crossings(eval, k_max, eng.kernel, opt.probes_per_ring, opt.max_rings,
                       opt.rel_tol, 64.0 * eng.eps, true, log_end_scale);
    if (static_cast<int>(sc.crossings.size()) < k_max) {
        throw PrecisionExhaustedError(
            "only " + std::to_string(sc.crossings.size()) + " of " + std::to_string(k_max) +
                " crossings resolvable before the numeric floor",
            static_cast<int>(sc.crossings.size()));
    }

    std::vector<Crossing> out;
    out.reserve(k_max);
    double prev = 1.0;
    for (int i = 0; i < k_max; ++i) {
        Crossing c;
        c.s = sc.crossings[i] * opt.s_hi;
        c.residual = sc.residuals[i];
        const double mid = 0.5 * (sc.crossings[i] + prev);
        auto hm = eval(mid);
        c.side_outward = (hm && hm->sign < 0) ? Side::Minus : Side::Plus;
        out.push_back(c);
        prev = sc.crossings[i];
    }
    return out;
}

// ---------------------------------------------------------------------
// Realization entry points
// ---------------------------------------------------------------------

std::pair<double, double> AdmissibleInterval::closed_subset(double fraction) const {
    const double margin = 0.5 * (1.0 - fraction);
    const double w = s_hi - s_lo;
    return {s_lo + margin * w, s_hi - margin * w};
}

Realization realize_path(const Path& path, const Segment& seed, const RealizeOptions& opt,
                         const SaddleSpectrum& spec, const TransitionSpec& tspec) {
    spec.validate();
    tspec.validate();
    seed.validate();
    if (path.empty()) throw ConfigError("path realization needs order >= 1");
    if (tspec.mu != 0.0) {
        throw ConfigError("path realization requires the intact network (mu = 0)");
    }
    if (opt.precision == PrecisionKind::Extended && !seed.analytic()) {
        throw ConfigError("extended precision supports only the analytic vertical seed");
    }

    // Reseeded mode realizes the first symbol by the working seed's side;
    // nested mode constrains one return level per symbol.
    const bool forward = opt.mode == RealizeMode::Reseeded;
    Segment work = seed;
    if (forward) {
        const Side want = path.front() == Symbol::Gamma1 ? Side::Plus : Side::Minus;
        if (seed.side() != want) work = seed.mirrored();
    }
    std::vector<std::optional<Symbol>> targets;
    if (!forward) {
        for (Symbol s : path) targets.emplace_back(s);
    } else if (path.size() == 1) {
        targets.emplace_back(std::nullopt);
    } else {
        for (size_t j = 1; j < path.size(); ++j) targets.emplace_back(path[j]);
    }

    std::exception_ptr last;
    for (int attempt = 0; attempt < 3; ++attempt) {
        const int probes = opt.probes_per_ring << (2 * attempt);
        try {
            if (opt.precision == PrecisionKind::Extended) {
                mpreal::default_precision(extended_digits(opt.mantissa_bits));
                VerticalSeed<mpreal> vs{mpreal(work.x0()), mpreal(work.y0())};
                return run_realize<mpreal>(path, work, vs, targets, opt, spec, tspec, probes,
                                           forward);
            }
            return run_realize<double>(path, work, DoubleSeed{&work}, targets, opt, spec,
                                       tspec, probes, forward);
        } catch (const InternalError&) {
            last = std::current_exception();
        }
    }
    std::rethrow_exception(last);
}

AdmissibleInterval refine_once(const AdmissibleInterval& current, Symbol target,
                               const RealizeOptions& opt, const SaddleSpectrum& spec,
                               const TransitionSpec& tspec) {
    if (current.prefix.empty() || current.windows.empty()) {
        throw ConfigError("refine_once needs a realized prefix to continue from");
    }
    if (current.precision == PrecisionKind::Extended) {
        throw ConfigError("refine_once continues binary64 intervals only; "
                          "rerun realize_path for extended precision");
    }
    Path path = current.prefix;
    path.push_back(target);
    RealizeOptions o = opt;
    o.mode = current.mode;
    o.precision = PrecisionKind::Binary64;
    return realize_path(path, current.seed, o, spec, tspec).interval;
}

PrefixRealization realize_infinite_prefix(const std::function<Symbol(int)>& stream, int depth,
                                          const Segment& seed, const RealizeOptions& opt,
                                          const SaddleSpectrum& spec,
                                          const TransitionSpec& tspec) {
    if (depth < 1) throw ConfigError("prefix realization needs depth >= 1");
    PrefixRealization out;
    out.consumed.reserve(depth);
    for (int i = 0; i < depth; ++i) out.consumed.push_back(stream(i));
    out.realization = realize_path(out.consumed, seed, opt, spec, tspec);
    const auto closed = out.realization.interval.closed_subset(opt.closed_fraction);
    out.midpoint_param = 0.5 * (closed.first + closed.second);
    out.midpoint_seed_point = out.realization.interval.seed.at(out.midpoint_param);
    return out;
}

// ---------------------------------------------------------------------
// Follows verifier
// ---------------------------------------------------------------------

FollowsReport verify_follows(const SuspendedTrajectory& traj, const Path& path,
                             const NeighbourhoodSpec& nbhd, const TransitionSpec& tspec) {
    if (!(nbhd.tube_window > 0.0) || nbhd.tube_window >= 0.5 * tspec.tau) {
        throw InvalidNeighbourhoodsError(
            "tube windows must satisfy 0 < w < tau/2 to stay disjoint from the block");
    }

    struct BlockVisit {
        double enter, exit;
        bool closed;
    };
    std::vector<double> entries;
    std::vector<BlockVisit> blocks;
    std::vector<std::pair<double, Symbol>> visits;  // complete tube passages

    const auto& ev = traj.events;
    for (size_t i = 0; i < ev.size(); ++i) {
        if (ev[i].section == BoundaryTag::SigmaInPlus || ev[i].section == BoundaryTag::SigmaInMinus) {
            entries.push_back(ev[i].t);
            if (i + 1 < ev.size()) {
                blocks.push_back(BlockVisit{ev[i].t, ev[i + 1].t, true});
            } else {
                blocks.push_back(BlockVisit{ev[i].t, ev[i].t, false});
            }
        } else {
            const bool completed = i + 1 < ev.size();
            if (completed) {
                const Symbol sym = ev[i].section == BoundaryTag::SigmaOutTop ? Symbol::Gamma1
                                                                             : Symbol::Gamma2;
                visits.push_back({ev[i].t + 0.5 * tspec.tau, sym});
            }
        }
    }

    FollowsReport rep;
    const int k = static_cast<int>(path.size());
    rep.follows = true;

    for (int j = 1; j <= k && rep.follows; ++j) {
        if (static_cast<int>(visits.size()) < j) {
            rep.follows = false;
            rep.violation = "trajectory ends before visit " + std::to_string(j);
            rep.violation_index = j;
            break;
        }
        if (visits[j - 1].second != path[j - 1]) {
            rep.follows = false;
            rep.violation = "visit " + std::to_string(j) + " follows connection " +
                            std::string(1, symbol_char(visits[j - 1].second)) + ", path wants " +
                            std::string(1, symbol_char(path[j - 1]));
            rep.violation_index = j;
            break;
        }
        if (static_cast<int>(entries.size()) < j + 1) {
            rep.follows = false;
            rep.violation = "trajectory ends before block entry " + std::to_string(j + 1);
            rep.violation_index = j;
            break;
        }
        const double tj = entries[j - 1];
        const double tj1 = entries[j];
        const double zj = visits[j - 1].first;
        if (!(tj < zj && zj < tj1)) {
            rep.follows = false;
            rep.violation = "entry/visit interleaving broken at j = " + std::to_string(j);
            rep.violation_index = j;
            break;
        }
    }
    if (rep.follows && k == 0 && entries.empty()) {
        rep.follows = false;
        rep.violation = "trajectory never enters the block";
        rep.violation_index = 1;
    }
    // Condition (iii): exactly one proper block interval between visits.
    for (int j = 1; j + 1 <= k && rep.follows; ++j) {
        const double za = visits[j - 1].first;
        const double zb = visits[j].first;
        int inside = 0;
        bool proper = true;
        for (const auto& b : blocks) {
            if (b.enter > za && b.enter < zb) {
                ++inside;
                proper = proper && b.closed && b.exit < zb;
            }
        }
        if (inside != 1 || !proper) {
            rep.follows = false;
            rep.violation = "block visits between z_" + std::to_string(j) + " and z_" +
                            std::to_string(j + 1) + " are not a single proper interval";
            rep.violation_index = j;
        }
    }

    const int n_entries = std::min<int>(k + 1, static_cast<int>(entries.size()));
    rep.entry_times.assign(entries.begin(), entries.begin() + n_entries);
    const int n_visits = std::min<int>(k, static_cast<int>(visits.size()));
    for (int j = 0; j < n_visits; ++j) {
        rep.visit_times.push_back(visits[j].first);
        rep.visit_symbols.push_back(visits[j].second);
    }
    return rep;
}

}  // namespace homnet
