#include <doctest.h>

#include <cmath>

#include "homnet/switching.hpp"

using namespace homnet;

namespace {

constexpr double kPi = kTwoPi / 2.0;

Path all_gamma1(int k) { return Path(k, Symbol::Gamma1); }

}  // namespace

TEST_CASE("segments: vertical, table, mirroring, validation") {
    const auto seed = Segment::default_seed();
    CHECK(seed.side() == Side::Plus);
    CHECK(seed.at(0.25).y == doctest::Approx(0.25));
    CHECK(seed.at(0.25).x == doctest::Approx(0.0));
    CHECK(seed.endpoint().y == 0.0);
    CHECK_THROWS_AS(seed.at(0.0), InvalidSegmentError);
    CHECK_THROWS_AS(seed.at(1.5), InvalidSegmentError);

    const auto mir = seed.mirrored();
    CHECK(mir.side() == Side::Minus);
    CHECK(mir.at(0.5).x == doctest::Approx(kPi));
    CHECK(mir.at(0.5).y == doctest::Approx(-0.5));

    const auto table = Segment::from_table(
        {{0.25, 0.05, 0.2}, {0.5, 0.1, 0.45}, {1.0, 0.2, 0.9}}, 0.0);
    CHECK(table.side() == Side::Plus);
    CHECK(table.at(0.125).y == doctest::Approx(0.1));
    CHECK(table.at(0.75).y == doctest::Approx(0.675));
    CHECK(table.mirrored().at(0.75).y == doctest::Approx(-0.675));

    CHECK_THROWS_AS(Segment::from_table({{0.5, 0.0, 0.4}, {1.0, 0.1, 0.2}}, 0.0),
                    InvalidSegmentError);  // height not monotone
    CHECK_THROWS_AS(Segment::from_table({{0.5, 0.0, 0.4}, {1.0, 0.1, -0.5}}, 0.0),
                    InvalidSegmentError);  // sign change
    CHECK_THROWS_AS(Segment::from_table({{0.5, 0.3, 0.2}, {0.8, 0.1, 0.4}, {1.0, 0.2, 0.6}}, 0.0),
                    InvalidSegmentError);  // angle not monotone
    CHECK_THROWS_AS(Segment::vertical(0.0, 0.0), InvalidSegmentError);
}

TEST_CASE("segment_image: closed form for the canonical vertical seed") {
    const auto spec = SaddleSpectrum::canonical();
    const auto img = segment_image(Segment::default_seed(), GridSpec{256, 1e-6}, spec);

    CHECK(img.r_decreasing);
    CHECK(img.phi_monotone_tail);
    for (const auto& s : img.samples) {
        CHECK(s.point.r == doctest::Approx(s.s * s.s).epsilon(1e-12));
        CHECK(s.point.phi == doctest::Approx(std::log(1.0 / s.s)).epsilon(1e-9));
        CHECK(s.point.cap == Cap::Top);
    }
    // phi(e^-2pi) - phi(e^-pi) = pi, and the radius ratio law r(s)/r(s') = (s/s')^2.
    const auto spec2 = spec;
    const auto p1 = local_map(Segment::default_seed().at(std::exp(-kPi)), spec2);
    const auto p2 = local_map(Segment::default_seed().at(std::exp(-kTwoPi)), spec2);
    CHECK(p2.phi - p1.phi == doctest::Approx(kPi).epsilon(1e-12));
    const auto& a = img.samples[10];
    const auto& b = img.samples[40];
    CHECK(a.point.r / b.point.r ==
          doctest::Approx((a.s / b.s) * (a.s / b.s)).epsilon(1e-9));
    CHECK(img.phi_span > std::log(1.0 / 1e-6) * 0.9);
}

TEST_CASE("find_crossings: canonical crossing table a_k = exp(-k pi)") {
    const auto spec = SaddleSpectrum::canonical();
    TransitionSpec t;
    const auto cr = find_crossings(Segment::default_seed(), 6, spec, t);
    REQUIRE(cr.size() == 6);
    for (int k = 1; k <= 6; ++k) {
        const double expected = std::exp(-k * kPi);
        CHECK(std::fabs(cr[k - 1].s - expected) / expected < 1e-10);
        CHECK(cr[k - 1].residual < 1e-12);
        // Side alternation outward of each crossing: +, -, +, ...
        CHECK(cr[k - 1].side_outward == (k % 2 == 1 ? Side::Plus : Side::Minus));
    }
    CHECK(cr[0].s == doctest::Approx(0.0432139182637723).epsilon(1e-10));
    CHECK(cr[1].s == doctest::Approx(0.00186744273170799).epsilon(1e-10));

    // Mirrored seed has identical crossing parameters.
    const auto mr = find_crossings(Segment::default_seed().mirrored(), 6, spec, t);
    for (int k = 0; k < 6; ++k) {
        CHECK(std::fabs(mr[k].s - cr[k].s) <= 1e-12 * cr[k].s);
    }

    CHECK_THROWS_AS(find_crossings(Segment::default_seed(), 500, spec, t),
                    PrecisionExhaustedError);
    try {
        find_crossings(Segment::default_seed(), 500, spec, t);
    } catch (const PrecisionExhaustedError& e) {
        CHECK(e.found >= 6);
        CHECK(e.found < 500);
    }
}

TEST_CASE("realize_path: level-1 intervals match the crossing table") {
    const auto spec = SaddleSpectrum::canonical();
    TransitionSpec t;
    RealizeOptions opt;

    const auto r1 = realize_path(parse_path("1"), Segment::default_seed(), opt, spec, t);
    CHECK(r1.interval.s_lo == doctest::Approx(std::exp(-kPi)).epsilon(1e-10));
    CHECK(r1.interval.s_hi == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r1.check.word() == "1");

    const auto r2 = realize_path(parse_path("2"), Segment::default_seed(), opt, spec, t);
    CHECK(r2.interval.s_lo == doctest::Approx(std::exp(-kTwoPi)).epsilon(1e-9));
    CHECK(r2.interval.s_hi == doctest::Approx(std::exp(-kPi)).epsilon(1e-9));
    CHECK(r2.check.word() == "2");

    // The two choices are disjoint subintervals of the seed.
    CHECK(r2.interval.s_hi <= r1.interval.s_lo * (1 + 1e-12));
}

TEST_CASE("refine_once nests and separates targets") {
    const auto spec = SaddleSpectrum::canonical();
    TransitionSpec t;
    RealizeOptions opt;

    const auto base = realize_path(parse_path("1"), Segment::default_seed(), opt, spec, t);
    const auto deeper = refine_once(base.interval, Symbol::Gamma1, opt, spec, t);
    CHECK(deeper.depth == 2);
    CHECK(deeper.prefix.size() == 2);
    CHECK(deeper.s_lo >= base.interval.s_lo - 1e-15);
    CHECK(deeper.s_hi <= base.interval.s_hi + 1e-15);

    // Interior samples of the refined interval follow the prefix (checked
    // through the first-return convention: iterate from R(beta(s))).
    const auto closed = deeper.closed_subset();
    for (double f : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double s = closed.first + f * (closed.second - closed.first);
        const auto w = return_map(Segment::default_seed().at(s), spec, t).point;
        IterateOptions io;
        io.n_max = 2;
        io.stable_tol = 0.0;
        const auto rec = iterate(w, io, spec, t);
        REQUIRE(rec.steps.size() == 2);
        CHECK(rec.steps[0].symbol == Symbol::Gamma1);
        CHECK(rec.steps[1].symbol == Symbol::Gamma1);
    }

    const auto other_target = refine_once(base.interval, Symbol::Gamma2, opt, spec, t);
    const bool disjoint = other_target.s_hi <= deeper.s_lo + 1e-15 ||
                          other_target.s_lo >= deeper.s_hi - 1e-15;
    CHECK(disjoint);
}

TEST_CASE("realize_path: order-3 witness and nesting invariant") {
    const auto spec = SaddleSpectrum::canonical();
    TransitionSpec t;
    RealizeOptions opt;

    const Path p = parse_path("121");
    const auto real = realize_path(p, Segment::default_seed(), opt, spec, t);
    CHECK(real.check.word() == "121");
    CHECK(real.widths.size() == 3);
    CHECK(real.widths[1] < real.widths[0]);
    CHECK(real.widths[2] < real.widths[1]);

    // Prefix nesting: the admissible interval of each longer prefix is
    // contained in the one of its prefix.
    const auto pre1 = realize_path(parse_path("1"), Segment::default_seed(), opt, spec, t);
    const auto pre2 = realize_path(parse_path("12"), Segment::default_seed(), opt, spec, t);
    CHECK(pre2.interval.s_lo >= pre1.interval.s_lo - 1e-15);
    CHECK(pre2.interval.s_hi <= pre1.interval.s_hi + 1e-15);
    CHECK(real.interval.s_lo >= pre2.interval.s_lo - 1e-15);
    CHECK(real.interval.s_hi <= pre2.interval.s_hi + 1e-15);
}

TEST_CASE("realize_path: every order-4 path in both modes") {
    const auto spec = SaddleSpectrum::canonical();
    TransitionSpec t;
    for (int mask = 0; mask < 16; ++mask) {
        Path p;
        for (int b = 0; b < 4; ++b) {
            p.push_back((mask >> b) & 1 ? Symbol::Gamma2 : Symbol::Gamma1);
        }
        for (RealizeMode mode : {RealizeMode::Nested, RealizeMode::Reseeded}) {
            RealizeOptions opt;
            opt.mode = mode;
            const auto real = realize_path(p, Segment::default_seed(), opt, spec, t);
            CHECK(real.check.word() == format_path(p));
            for (size_t d = 1; d < real.widths.size(); ++d) {
                CHECK(real.widths[d] < real.widths[d - 1]);
            }
        }
    }
}

TEST_CASE("realization equivariance: swapped path from the mirrored seed") {
    const auto spec = SaddleSpectrum::canonical();
    TransitionSpec t;
    RealizeOptions opt;

    const Path p = parse_path("1211");
    const auto a = realize_path(p, Segment::default_seed(), opt, spec, t);
    const auto b = realize_path(swapped_path(p), Segment::default_seed().mirrored(), opt,
                                spec, t);
    CHECK(std::fabs(angle_diff(b.witness.x, a.witness.x + kPi)) < 1e-10);
    CHECK(b.witness.y == doctest::Approx(-a.witness.y).epsilon(1e-10));
    CHECK(b.check.word() == format_path(swapped_path(p)));
}

TEST_CASE("multiplicity: outermost vs second matching ring differ in winding") {
    const auto spec = SaddleSpectrum::canonical();
    TransitionSpec t;
    const Path p = parse_path("121");

    RealizeOptions opt;
    const auto a = realize_path(p, Segment::default_seed(), opt, spec, t);
    RealizeOptions skip;
    skip.ring_skip = 1;
    const auto b = realize_path(p, Segment::default_seed(), skip, spec, t);

    CHECK(a.check.word() == b.check.word());
    const double rev_a = a.check.steps[0].revolutions;
    const double rev_b = b.check.steps[0].revolutions;
    CHECK(std::fabs(rev_a - rev_b) > 0.5);
    CHECK(std::fabs(a.witness.y) > std::fabs(b.witness.y));
}

TEST_CASE("reseeded mode reaches order 10") {
    const auto spec = SaddleSpectrum::canonical();
    TransitionSpec t;
    RealizeOptions opt;
    opt.mode = RealizeMode::Reseeded;

    for (const char* word : {"1111111111", "1212121212", "1221211221"}) {
        const auto real = realize_path(parse_path(word), Segment::default_seed(), opt, spec, t);
        CHECK(real.check.word() == word);
        for (size_t d = 1; d < real.widths.size(); ++d) {
            CHECK(real.widths[d] < real.widths[d - 1]);
        }
    }
}

TEST_CASE("extended precision deepens the nested construction") {
    const auto spec = SaddleSpectrum::canonical();
    TransitionSpec t;
    RealizeOptions opt;
    opt.mode = RealizeMode::Nested;
    opt.precision = PrecisionKind::Extended;
    opt.mantissa_bits = 256;

    const auto real = realize_path(all_gamma1(12), Segment::default_seed(), opt, spec, t);
    CHECK(real.interval.depth == 12);
    CHECK(real.interval.precision == PrecisionKind::Extended);
    CHECK(real.interval.mantissa_bits == 256);
    for (size_t d = 1; d < real.widths.size(); ++d) {
        CHECK(real.widths[d] < real.widths[d - 1]);
    }
    // The double-precision iterate check confirms the prefix as far as it
    // can resolve the collapsing heights.
    const std::string word = real.check.word();
    CHECK(word.size() >= 6);
    CHECK(format_path(real.interval.prefix).substr(0, word.size()) == word);

    CHECK_THROWS_AS(realize_path(all_gamma1(2),
                                 Segment::from_table({{0.5, 0.0, 0.4}, {1.0, 0.0, 0.8}}, 0.0),
                                 opt, spec, t),
                    ConfigError);
}

TEST_CASE("realize_infinite_prefix: streams, nesting, witnesses") {
    const auto spec = SaddleSpectrum::canonical();
    TransitionSpec t;
    RealizeOptions opt;
    opt.mode = RealizeMode::Reseeded;

    auto alternating = [](int i) { return i % 2 == 0 ? Symbol::Gamma1 : Symbol::Gamma2; };
    const auto alt = realize_infinite_prefix(alternating, 8, Segment::default_seed(), opt,
                                             spec, t);
    CHECK(format_path(alt.consumed) == "12121212");
    CHECK(alt.realization.check.word() == "12121212");
    for (size_t d = 1; d < alt.realization.widths.size(); ++d) {
        CHECK(alt.realization.widths[d] < alt.realization.widths[d - 1]);
    }
    CHECK(alt.midpoint_param > alt.realization.interval.s_lo);
    CHECK(alt.midpoint_param < alt.realization.interval.s_hi);

    auto constant = [](int) { return Symbol::Gamma1; };
    const auto con = realize_infinite_prefix(constant, 8, Segment::default_seed(), opt, spec, t);
    CHECK(con.realization.check.word() == "11111111");

    CHECK_THROWS_AS(realize_infinite_prefix(constant, 0, Segment::default_seed(), opt, spec, t),
                    ConfigError);
}

TEST_CASE("realization requires the intact network") {
    const auto spec = SaddleSpectrum::canonical();
    TransitionSpec t;
    t.mu = 0.01;
    RealizeOptions opt;
    CHECK_THROWS_AS(realize_path(parse_path("1"), Segment::default_seed(), opt, spec, t),
                    ConfigError);
}

TEST_CASE("verify_follows: end-to-end on a realized order-3 witness") {
    const auto spec = SaddleSpectrum::canonical();
    TransitionSpec t;
    RealizeOptions opt;

    const Path p = parse_path("121");
    const auto real = realize_path(p, Segment::default_seed(), opt, spec, t);

    double horizon = 1.0;
    for (const auto& s : real.check.steps) horizon += s.flight_time + t.tau;
    REQUIRE(real.check.final.has_value());
    horizon += time_of_flight(*real.check.final, spec);

    const auto traj = suspend_orbit(real.witness, horizon, horizon / 256.0, spec, t);
    const NeighbourhoodSpec nbhd{0.1};

    const auto ok = verify_follows(traj, p, nbhd, t);
    CHECK(ok.follows);
    CHECK(ok.entry_times.size() == 4);
    CHECK(ok.visit_times.size() == 3);
    for (int j = 0; j < 3; ++j) {
        CHECK(ok.visit_symbols[j] == p[j]);
        CHECK(ok.entry_times[j] < ok.visit_times[j]);
        CHECK(ok.visit_times[j] < ok.entry_times[j + 1]);
    }

    const auto bad = verify_follows(traj, parse_path("221"), nbhd, t);
    CHECK_FALSE(bad.follows);
    CHECK(bad.violation_index == 1);

    const auto vacuous = verify_follows(traj, Path{}, nbhd, t);
    CHECK(vacuous.follows);
    CHECK(vacuous.entry_times.size() == 1);

    CHECK_THROWS_AS(verify_follows(traj, p, NeighbourhoodSpec{0.6}, t),
                    InvalidNeighbourhoodsError);
    CHECK_THROWS_AS(verify_follows(traj, p, NeighbourhoodSpec{0.0}, t),
                    InvalidNeighbourhoodsError);
}

TEST_CASE("path parsing") {
    CHECK(format_path(parse_path("1212")) == "1212");
    CHECK(format_path(swapped_path(parse_path("112"))) == "221");
    CHECK_THROWS_AS(parse_path("103"), ConfigError);
}
