#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "homnet/audit.hpp"
#include "homnet/config.hpp"
#include "homnet/records.hpp"

namespace homnet {

struct CommandRequest {
    std::string command;
    RecordFormat format = RecordFormat::Jsonl;

    // map / suspend
    double x = 0.0;
    double y = 0.01;
    // crossings
    int k = 4;
    // realize / verify-follows
    std::string path = "1";
    RealizeMode mode = RealizeMode::Nested;
    int ring_skip = 0;
    // itinerary
    std::string stream = "alternating";  // constant1 constant2 alternating thue-morse
    int depth = 8;
    // suspend
    double horizon = 60.0;
    double sample_dt = 0.1;
    // audit-stability
    int samples = 10000;
    double y_lo = 1e-6;
    double y_hi = 0.5;
    // audit-contraction
    int grid = 25;
    // periodic-search
    int max_period = 4;
    double y_floor = 1e-6;
    int grid_x = 512;
    int grid_y = 512;
    // attractors
    std::vector<double> mu_values{1e-3, 1e-2};
    // contrast-horseshoe
    int bands = 24;
    double band_y_lo = 1e-3;
    double band_y_hi = 0.3;
    double x_halfwidth = 3.0;
};

// Dispatch one subcommand against a validated config, writing the record
// stream to `out`. Fills `manifest` (sans timestamp) when given. Throws the
// module errors; exit_code_for maps them onto the CLI contract.
void run_command(const CommandRequest& req, const RunConfig& cfg, std::ostream& out,
                 RunManifest* manifest = nullptr);

// 0 success, 2 config, 3 precision exhausted, 4 hypothesis violation,
// 5 runtime model error.
int exit_code_for(const std::exception& e);

// One-line machine-readable error object.
std::string error_object(const std::exception& e);

// Named symbol streams for the itinerary command.
Symbol stream_symbol(const std::string& name, int index);

}  // namespace homnet
