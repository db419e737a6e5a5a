#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "homnet/cli.hpp"

namespace {

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"homnet: saddle-focus homoclinic network laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    if (const char* env = std::getenv("HOMNET_CONFIG")) config_path = env;
    std::string out_path;
    std::string manifest_path;
    std::string format = "jsonl";

    // Flag overrides mirror the config keys.
    double C = -1, E = -1, alpha = -1, mu = 0, tau = -1, r_max = -1;
    bool has_mu = false, contrast_ok = false;
    std::vector<double> A_entries;
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::string precision;
    int mantissa_bits = 0;
    double tube_window = 0, bisection_tol = 0, stable_tol = 0;

    app.add_option("--config", config_path, "config file (sections [spectrum] [transition] [tolerances] [run])");
    app.add_option("--out", out_path, "write records to a file instead of stdout");
    app.add_option("--manifest", manifest_path, "write the run manifest to this file");
    app.add_option("--format", format, "jsonl or csv")->check(CLI::IsMember({"jsonl", "csv"}));
    app.add_option("--C", C, "contraction rate");
    app.add_option("--E", E, "expansion rate");
    app.add_option("--alpha", alpha, "spiral frequency");
    app.add_flag("--contrast-ok", contrast_ok, "acknowledge the expanding regime C <= E");
    app.add_option("--A", A_entries, "transition matrix a11 a12 a21 a22")->expected(4);
    app.add_option("--mu", mu, "homoclinic splitting offset")->trigger_on_parse(false);
    auto* mu_opt = app.get_option("--mu");
    app.add_option("--tau", tau, "tube travel time");
    app.add_option("--r-max", r_max, "flow-box validity radius");
    app.add_option("--seed", seed, "rng seed");
    auto* seed_opt = app.get_option("--seed");
    app.add_option("--precision", precision, "binary64 or extended")
        ->check(CLI::IsMember({"binary64", "extended"}));
    app.add_option("--mantissa-bits", mantissa_bits, "extended precision mantissa bits");
    app.add_option("--tube-window", tube_window, "verify-follows neighbourhood half-width");
    app.add_option("--bisection-tol", bisection_tol, "crossing bisection relative tolerance");
    app.add_option("--stable-tol", stable_tol, "stable manifold tolerance");

    homnet::CommandRequest req;

    auto* c_map = app.add_subcommand("map", "local and return map images of a wall point");
    c_map->add_option("--x", req.x, "wall angle");
    c_map->add_option("--y", req.y, "wall height");

    auto* c_cross = app.add_subcommand("crossings", "stable-manifold crossings of the seed segment");
    c_cross->add_option("--k", req.k, "number of crossings");

    auto* c_realize = app.add_subcommand("realize", "realize a finite switching path");
    c_realize->add_option("--path", req.path, "symbol word, e.g. 1211");
    std::string mode = "nested";
    c_realize->add_option("--mode", mode, "nested or reseeded")
        ->check(CLI::IsMember({"nested", "reseeded"}));
    c_realize->add_option("--ring-skip", req.ring_skip, "take the n-th matching ring at depth 1");

    auto* c_itin = app.add_subcommand("itinerary", "realize a prefix of an infinite stream");
    c_itin->add_option("--stream", req.stream, "constant1 constant2 alternating thue-morse");
    c_itin->add_option("--depth", req.depth, "prefix length");

    auto* c_susp = app.add_subcommand("suspend", "timed trajectory through block and tubes");
    c_susp->add_option("--x", req.x, "wall angle");
    c_susp->add_option("--y", req.y, "wall height");
    c_susp->add_option("--horizon", req.horizon, "time horizon");
    c_susp->add_option("--dt", req.sample_dt, "sample spacing");

    auto* c_verify = app.add_subcommand("verify-follows", "end-to-end path following check");
    c_verify->add_option("--path", req.path, "symbol word");
    std::string vmode = "nested";
    c_verify->add_option("--mode", vmode, "nested or reseeded")
        ->check(CLI::IsMember({"nested", "reseeded"}));

    auto* c_stab = app.add_subcommand("audit-stability", "attraction statistics");
    c_stab->add_option("--samples", req.samples, "sample count");
    c_stab->add_option("--y-lo", req.y_lo, "sample |y| lower bound");
    c_stab->add_option("--y-hi", req.y_hi, "sample |y| upper bound");

    auto* c_contr = app.add_subcommand("audit-contraction", "Jacobian norm profile");
    c_contr->add_option("--grid", req.grid, "log grid points");
    c_contr->add_option("--y-lo", req.y_lo, "grid lower bound");
    c_contr->add_option("--y-hi", req.y_hi, "grid upper bound");

    auto* c_per = app.add_subcommand("periodic-search", "periodic points of the return map");
    c_per->add_option("--max-period", req.max_period, "search periods 1..p");
    c_per->add_option("--y-floor", req.y_floor, "ignore orbits below this height");
    c_per->add_option("--grid-x", req.grid_x, "seed grid in x");
    c_per->add_option("--grid-y", req.grid_y, "seed grid in y");

    auto* c_att = app.add_subcommand("attractors", "attractor scan over the splitting offset");
    c_att->add_option("--mu", req.mu_values, "splitting values")->expected(-1);

    auto* c_horse = app.add_subcommand("contrast-horseshoe", "double-crossing rectangle scan");
    c_horse->add_option("--bands", req.bands, "log-spaced y bands");
    c_horse->add_option("--y-lo", req.band_y_lo, "smallest band height");
    c_horse->add_option("--y-hi", req.band_y_hi, "largest band height");
    c_horse->add_option("--x-halfwidth", req.x_halfwidth, "rectangle half-width");

    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
        sub->fallthrough();
    }

    CLI11_PARSE(app, argc, argv);

    try {
        homnet::RunConfig cfg;
        if (!config_path.empty()) cfg = homnet::load_config_file(config_path);
        if (C > 0) cfg.spectrum.C = C;
        if (E > 0) cfg.spectrum.E = E;
        if (alpha > 0) cfg.spectrum.alpha = alpha;
        if (contrast_ok) cfg.spectrum.contrast_ok = true;
        if (A_entries.size() == 4) {
            cfg.transition.A = homnet::Mat2{A_entries[0], A_entries[1], A_entries[2],
                                            A_entries[3]};
        }
        if (mu_opt->count() > 0) {
            cfg.transition.mu = mu;
            has_mu = true;
        }
        (void)has_mu;
        if (tau > 0) cfg.transition.tau = tau;
        if (r_max > 0) cfg.transition.r_max = r_max;
        if (seed_opt->count() > 0) {
            cfg.run.seed = seed;
            has_seed = true;
        }
        (void)has_seed;
        if (!precision.empty()) {
            cfg.run.precision = precision == "extended" ? homnet::PrecisionKind::Extended
                                                        : homnet::PrecisionKind::Binary64;
        }
        if (mantissa_bits > 0) cfg.run.mantissa_bits = mantissa_bits;
        if (tube_window > 0) cfg.run.tube_window = tube_window;
        if (bisection_tol > 0) cfg.tolerances.bisection_rel_tol = bisection_tol;
        if (stable_tol > 0) cfg.tolerances.stable_tol = stable_tol;
        cfg.validate();

        req.command = app.get_subcommands().front()->get_name();
        req.format = format == "csv" ? homnet::RecordFormat::Csv : homnet::RecordFormat::Jsonl;
        if (c_realize->parsed()) {
            req.mode = mode == "reseeded" ? homnet::RealizeMode::Reseeded
                                          : homnet::RealizeMode::Nested;
        }
        if (c_verify->parsed()) {
            req.mode = vmode == "reseeded" ? homnet::RealizeMode::Reseeded
                                           : homnet::RealizeMode::Nested;
        }
        (void)c_map;
        (void)c_cross;
        (void)c_itin;
        (void)c_susp;
        (void)c_stab;
        (void)c_contr;
        (void)c_per;
        (void)c_att;
        (void)c_horse;

        homnet::RunManifest manifest;
        manifest.timestamp = iso_timestamp();

        std::ostringstream payload;
        homnet::run_command(req, cfg, payload, &manifest);

        if (out_path.empty()) {
            std::cout << payload.str();
            if (!manifest_path.empty()) {
                std::ofstream mf(manifest_path);
                mf << manifest.to_json() << "\n";
            }
        } else {
            std::ofstream of(out_path);
            if (!of) throw homnet::ConfigError("cannot open output file '" + out_path + "'");
            of << payload.str();
            const std::string mp = manifest_path.empty() ? out_path + ".manifest.json"
                                                         : manifest_path;
            std::ofstream mf(mp);
            mf << manifest.to_json() << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << homnet::error_object(e);
        return homnet::exit_code_for(e);
    }
}
