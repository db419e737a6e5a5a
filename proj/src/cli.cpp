#include "homnet/cli.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace homnet {

namespace {

std::string join_times(const std::vector<double>& ts) {
    std::string s;
    for (size_t i = 0; i < ts.size(); ++i) {
        if (i) s.push_back(';');
        s += format_double(ts[i]);
    }
    return s;
}

std::vector<Record> cmd_map(const CommandRequest& req, const RunConfig& cfg) {
    const WallPoint w{wrap_angle(req.x), req.y};
    const CapPoint c = local_map(w, cfg.spectrum);
    const ReturnResult rr = return_map(w, cfg.spectrum, cfg.transition);
    Record rec;
    rec.add("x", w.x)
        .add("y", w.y)
        .add("r", c.r)
        .add("phi", c.phi)
        .add("cap", std::string(to_string(c.cap)))
        .add("flight_time", rr.flight_time)
        .add("x_return", rr.point.x)
        .add("y_return", rr.point.y)
        .add("symbol", std::string(1, symbol_char(rr.symbol)));
    return {rec};
}

std::vector<Record> cmd_crossings(const CommandRequest& req, const RunConfig& cfg) {
    const auto crossings = find_crossings(Segment::default_seed(), req.k, cfg.spectrum,
                                          cfg.transition, cfg.crossing_options());
    std::vector<Record> out;
    out.reserve(crossings.size());
    for (size_t i = 0; i < crossings.size(); ++i) {
        Record rec;
        rec.add("k", static_cast<std::int64_t>(i + 1))
            .add("a_k", crossings[i].s)
            .add("residual", crossings[i].residual);
        out.push_back(rec);
    }
    return out;
}

std::vector<Record> realize_records(const Realization& real, const std::string& label,
                                    const std::string& mode) {
    std::vector<Record> out;
    const std::string realized = real.check.word().substr(0, real.interval.prefix.size());
    for (const auto& b : real.interval.log) {
        Record rec;
        rec.add("path", label)
            .add("mode", mode)
            .add("depth", static_cast<std::int64_t>(b.depth))
            .add("symbol", std::string(1, symbol_char(b.symbol)))
            .add("ring", static_cast<std::int64_t>(b.ring_index))
            .add("s_lo", b.seed_lo)
            .add("s_hi", b.seed_hi)
            .add("width", b.width)
            .add("seed_param", real.seed_param)
            .add("witness_x", real.witness.x)
            .add("witness_y", real.witness.y)
            .add("realized", realized);
        out.push_back(rec);
    }
    return out;
}

std::vector<Record> cmd_realize(const CommandRequest& req, const RunConfig& cfg) {
    const Path path = parse_path(req.path);
    RealizeOptions opt = cfg.realize_options(req.mode);
    opt.ring_skip = req.ring_skip;
    const Realization real =
        realize_path(path, Segment::default_seed(), opt, cfg.spectrum, cfg.transition);
    return realize_records(real, req.path, to_string(req.mode));
}

std::vector<Record> cmd_itinerary(const CommandRequest& req, const RunConfig& cfg) {
    const std::string name = req.stream;
    RealizeOptions opt = cfg.realize_options(RealizeMode::Reseeded);
    const auto pre = realize_infinite_prefix(
        [&](int i) { return stream_symbol(name, i); }, req.depth, Segment::default_seed(),
        opt, cfg.spectrum, cfg.transition);
    std::vector<Record> out;
    for (const auto& b : pre.realization.interval.log) {
        Record rec;
        rec.add("stream", name)
            .add("depth", static_cast<std::int64_t>(b.depth))
            .add("symbol", std::string(1, symbol_char(b.symbol)))
            .add("width", b.width)
            .add("midpoint_s", pre.midpoint_param)
            .add("witness_x", pre.realization.witness.x)
            .add("witness_y", pre.realization.witness.y)
            .add("realized", format_path(pre.consumed));
        out.push_back(rec);
    }
    return out;
}

std::vector<Record> suspend_records(const SuspendedTrajectory& traj) {
    std::vector<Record> out;
    out.reserve(traj.samples.size() + traj.events.size());
    size_t si = 0, ei = 0;
    while (si < traj.samples.size() || ei < traj.events.size()) {
        const bool take_event =
            ei < traj.events.size() &&
            (si >= traj.samples.size() || traj.events[ei].t <= traj.samples[si].t);
        Record rec;
        if (take_event) {
            const auto& e = traj.events[ei++];
            rec.add("t", e.t)
                .add("kind", std::string("event"))
                .add("region", std::string(""))
                .add("section", std::string(to_string(e.section)))
                .add("a", e.a)
                .add("b", e.b);
        } else {
            const auto& s = traj.samples[si++];
            rec.add("t", s.t)
                .add("kind", std::string("sample"))
                .add("region", std::string(to_string(s.region)))
                .add("section", std::string(""))
                .add("a", s.px)
                .add("b", s.py);
        }
        out.push_back(rec);
    }
    return out;
}

std::vector<Record> cmd_suspend(const CommandRequest& req, const RunConfig& cfg) {
    const auto traj = suspend_orbit(WallPoint{wrap_angle(req.x), req.y}, req.horizon,
                                    req.sample_dt, cfg.spectrum, cfg.transition);
    return suspend_records(traj);
}

std::vector<Record> cmd_verify_follows(const CommandRequest& req, const RunConfig& cfg) {
    const Path path = parse_path(req.path);
    const RealizeOptions opt = cfg.realize_options(req.mode);
    const Realization real =
        realize_path(path, Segment::default_seed(), opt, cfg.spectrum, cfg.transition);

    // Horizon long enough for k tube passages plus the next block entry.
    double horizon = 1.0;
    for (const auto& s : real.check.steps) horizon += s.flight_time + cfg.transition.tau;
    if (real.check.final && real.check.final->y != 0.0) {
        horizon += time_of_flight(*real.check.final, cfg.spectrum);
    }
    const auto traj =
        suspend_orbit(real.witness, horizon, horizon / 512.0, cfg.spectrum, cfg.transition);
    const FollowsReport rep =
        verify_follows(traj, path, NeighbourhoodSpec{cfg.run.tube_window}, cfg.transition);

    Record rec;
    std::string word;
    for (Symbol s : rep.visit_symbols) word.push_back(symbol_char(s));
    rec.add("path", req.path)
        .add("follows", rep.follows)
        .add("entries", static_cast<std::int64_t>(rep.entry_times.size()))
        .add("visits", static_cast<std::int64_t>(rep.visit_times.size()))
        .add("visit_word", word)
        .add("entry_times", join_times(rep.entry_times))
        .add("visit_times", join_times(rep.visit_times))
        .add("violation", rep.violation)
        .add("violation_index", static_cast<std::int64_t>(rep.violation_index));
    return {rec};
}

std::vector<Record> cmd_stability(const CommandRequest& req, const RunConfig& cfg) {
    StabilityOptions opt;
    opt.samples = req.samples;
    opt.y_lo = req.y_lo;
    opt.y_hi = req.y_hi;
    opt.seed = cfg.run.seed;
    opt.n_max = cfg.run.n_max;
    const StabilityReport rep = stability_sample(opt, cfg.spectrum, cfg.transition);
    Record rec;
    rec.add("samples", static_cast<std::int64_t>(rep.samples))
        .add("attracted", static_cast<std::int64_t>(rep.attracted))
        .add("escaped", static_cast<std::int64_t>(rep.escaped))
        .add("undecided", static_cast<std::int64_t>(rep.undecided))
        .add("fraction", rep.samples ? static_cast<double>(rep.attracted) / rep.samples : 0.0)
        .add("max_excursion", rep.max_excursion)
        .add("max_steps", static_cast<std::int64_t>(rep.max_steps))
        .add("mean_steps", rep.mean_steps)
        .add("y_lo", opt.y_lo)
        .add("y_hi", opt.y_hi)
        .add("seed", static_cast<std::uint64_t>(rep.seed));
    return {rec};
}

std::vector<Record> cmd_contraction(const CommandRequest& req, const RunConfig& cfg) {
    ContractionOptions opt;
    opt.grid = req.grid;
    opt.y_lo = req.y_lo > 0 ? req.y_lo : 1e-4;
    opt.y_hi = req.y_hi;
    const ContractionProfile prof = contraction_profile(opt, cfg.spectrum, cfg.transition);
    std::vector<Record> out;
    for (size_t i = 0; i < prof.y.size(); ++i) {
        Record rec;
        rec.add("y", prof.y[i])
            .add("norm", prof.norm[i])
            .add("slope", prof.slope)
            .add("expected_slope", cfg.spectrum.delta() - 1.0);
        out.push_back(rec);
    }
    return out;
}

std::vector<Record> cmd_periodic_search(const CommandRequest& req, const RunConfig& cfg) {
    PeriodicSearchOptions opt;
    opt.max_period = req.max_period;
    opt.y_floor = req.y_floor;
    opt.grid_x = req.grid_x;
    opt.grid_y = req.grid_y;
    const AttractorReport rep = periodic_orbit_search(opt, cfg.spectrum, cfg.transition);
    std::vector<Record> out;
    for (const auto& o : rep.orbits) {
        Record rec;
        rec.add("period", static_cast<std::int64_t>(o.period))
            .add("x", o.point.x)
            .add("y", o.point.y)
            .add("word", o.word)
            .add("residual", o.residual)
            .add("mult_max", o.mult_abs_max)
            .add("mult_min", o.mult_abs_min)
            .add("attracting", o.attracting)
            .add("symmetric_self", o.symmetric_self);
        out.push_back(rec);
    }
    return out;
}

std::vector<Record> cmd_attractors(const CommandRequest& req, const RunConfig& cfg) {
    AttractorScanOptions opt;
    opt.mu_values = req.mu_values;
    opt.max_period = req.max_period;
    const auto reports = attractor_scan(opt, cfg.spectrum, cfg.transition);
    std::vector<Record> out;
    for (const auto& rep : reports) {
        if (rep.orbits.empty()) {
            Record rec;
            rec.add("mu", rep.mu)
                .add("count", static_cast<std::int64_t>(0))
                .add("orbit", static_cast<std::int64_t>(-1))
                .add("period", static_cast<std::int64_t>(0))
                .add("word", std::string(""))
                .add("y_amplitude", 0.0)
                .add("mult_max", 0.0)
                .add("attracting", false)
                .add("symmetric_self", false)
                .add("transient_word", rep.transient_word)
                .add("transient_switches", static_cast<std::int64_t>(rep.transient_switches));
            out.push_back(rec);
            continue;
        }
        for (size_t i = 0; i < rep.orbits.size(); ++i) {
            const auto& o = rep.orbits[i];
            double amp = 0.0;
            WallPoint pt = o.point;
            for (int j = 0; j < o.period; ++j) {
                amp = std::max(amp, std::fabs(pt.y));
                TransitionSpec ts = cfg.transition;
                ts.mu = rep.mu;
                pt = return_map(pt, cfg.spectrum, ts).point;
            }
            Record rec;
            rec.add("mu", rep.mu)
                .add("count", static_cast<std::int64_t>(rep.orbits.size()))
                .add("orbit", static_cast<std::int64_t>(i))
                .add("period", static_cast<std::int64_t>(o.period))
                .add("word", o.word)
                .add("y_amplitude", amp)
                .add("mult_max", o.mult_abs_max)
                .add("attracting", o.attracting)
                .add("symmetric_self", o.symmetric_self)
                .add("transient_word", rep.transient_word)
                .add("transient_switches", static_cast<std::int64_t>(rep.transient_switches));
            out.push_back(rec);
        }
    }
    return out;
}

std::vector<Record> cmd_contrast_horseshoe(const CommandRequest& req, const RunConfig& cfg) {
    HorseshoeScanOptions opt;
    opt.bands = req.bands;
    opt.y_lo = req.band_y_lo;
    opt.y_hi = req.band_y_hi;
    opt.x_halfwidth = req.x_halfwidth;
    const auto evidence = horseshoe_scan(opt, cfg.spectrum, cfg.transition);
    std::vector<Record> out;
    for (const auto& ev : evidence) {
        Record rec;
        rec.add("x_center", ev.rect.x_center)
            .add("x_halfwidth", ev.rect.x_halfwidth)
            .add("y_lo", ev.rect.y_lo)
            .add("y_hi", ev.rect.y_hi)
            .add("transits_lo", static_cast<std::int64_t>(ev.transits_lo))
            .add("transits_hi", static_cast<std::int64_t>(ev.transits_hi))
            .add("double_crossing", ev.double_crossing);
        out.push_back(rec);
    }
    return out;
}

}  // namespace

Symbol stream_symbol(const std::string& name, int index) {
    if (name == "constant1") return Symbol::Gamma1;
    if (name == "constant2") return Symbol::Gamma2;
    if (name == "alternating") return index % 2 == 0 ? Symbol::Gamma1 : Symbol::Gamma2;
    if (name == "thue-morse") {
        return std::popcount(static_cast<unsigned>(index)) % 2 == 0 ? Symbol::Gamma1
                                                                    : Symbol::Gamma2;
    }
    throw ConfigError("unknown stream '" + name +
                      "' (constant1, constant2, alternating, thue-morse)");
}

void run_command(const CommandRequest& req, const RunConfig& cfg, std::ostream& out,
                 RunManifest* manifest) {
    cfg.validate();
    std::vector<Record> records;
    if (req.command == "map") {
        records = cmd_map(req, cfg);
    } else if (req.command == "crossings") {
        records = cmd_crossings(req, cfg);
    } else if (req.command == "realize") {
        records = cmd_realize(req, cfg);
    } else if (req.command == "itinerary") {
        records = cmd_itinerary(req, cfg);
    } else if (req.command == "suspend") {
        records = cmd_suspend(req, cfg);
    } else if (req.command == "verify-follows") {
        records = cmd_verify_follows(req, cfg);
    } else if (req.command == "audit-stability") {
        records = cmd_stability(req, cfg);
    } else if (req.command == "audit-contraction") {
        records = cmd_contraction(req, cfg);
    } else if (req.command == "periodic-search") {
        records = cmd_periodic_search(req, cfg);
    } else if (req.command == "attractors") {
        records = cmd_attractors(req, cfg);
    } else if (req.command == "contrast-horseshoe") {
        records = cmd_contrast_horseshoe(req, cfg);
    } else {
        throw ConfigError("unknown command '" + req.command + "'");
    }

    const std::string payload =
        emit_records_string(records, req.format);
    out << payload;
    if (manifest) {
        manifest->command = req.command;
        manifest->precision = to_string(cfg.run.precision);
        manifest->config_echo = cfg.echo();
        manifest->input_digest = hex64(fnv1a64(manifest->config_echo));
        manifest->output_digest = hex64(fnv1a64(payload));
        manifest->record_count = records.size();
    }
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const HypothesisViolationError*>(&e)) return 4;
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const PrecisionExhaustedError*>(&e)) return 3;
    return 5;
}

std::string error_object(const std::exception& e) {
    const char* kind = "RuntimeError";
    if (dynamic_cast<const HypothesisViolationError*>(&e)) {
        kind = "HypothesisViolation";
    } else if (dynamic_cast<const ConfigError*>(&e)) {
        kind = "ConfigError";
    } else if (dynamic_cast<const PrecisionExhaustedError*>(&e)) {
        kind = "PrecisionExhausted";
    } else if (dynamic_cast<const StableManifoldError*>(&e)) {
        kind = "StableManifoldInput";
    } else if (dynamic_cast<const LeftNeighbourhoodError*>(&e)) {
        kind = "LeftNeighbourhood";
    } else if (dynamic_cast<const OutsideFlowBoxError*>(&e)) {
        kind = "OutsideFlowBox";
    } else if (dynamic_cast<const InvalidSegmentError*>(&e)) {
        kind = "InvalidSegment";
    } else if (dynamic_cast<const InvalidNeighbourhoodsError*>(&e)) {
        kind = "InvalidNeighbourhoods";
    } else if (dynamic_cast<const InvalidRectangleError*>(&e)) {
        kind = "InvalidRectangle";
    } else if (dynamic_cast<const OutOfBlockError*>(&e)) {
        kind = "OutOfBlock";
    } else if (dynamic_cast<const ModelError*>(&e)) {
        kind = "ModelError";
    } else if (dynamic_cast<const InternalError*>(&e)) {
        kind = "InternalError";
    }
    std::ostringstream os;
    Record rec;
    rec.add("error", std::string(kind)).add("message", std::string(e.what()));
    emit_records({rec}, RecordFormat::Jsonl, os);
    return os.str();
}

}  // namespace homnet
