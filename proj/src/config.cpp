#include "homnet/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "homnet/records.hpp"

namespace homnet {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_double(const std::string& path, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE) {
        throw ConfigError(path + ": expected a number, got '" + value + "'");
    }
    return v;
}

std::uint64_t parse_u64(const std::string& path, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE) {
        throw ConfigError(path + ": expected an unsigned integer, got '" + value + "'");
    }
    return v;
}

int parse_int(const std::string& path, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE) {
        throw ConfigError(path + ": expected an integer, got '" + value + "'");
    }
    return static_cast<int>(v);
}

bool parse_bool(const std::string& path, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError(path + ": expected a boolean, got '" + value + "'");
}

}  // namespace

void RunConfig::validate() const {
    spectrum.validate();
    transition.validate();
    if (!(tolerances.bisection_rel_tol > 0.0) || tolerances.bisection_rel_tol > 1e-6) {
        throw ConfigError("[tolerances].bisection_rel_tol must lie in (0, 1e-6]");
    }
    if (!(tolerances.stable_tol > 0.0) || tolerances.stable_tol > 1e-6) {
        throw ConfigError("[tolerances].stable_tol must lie in (0, 1e-6]");
    }
    if (!(tolerances.underflow_floor >= 0.0)) {
        throw ConfigError("[tolerances].underflow_floor must be >= 0");
    }
    if (run.mantissa_bits < 53 || run.mantissa_bits > 16384) {
        throw ConfigError("[run].mantissa_bits must lie in [53, 16384]");
    }
    if (!(run.tube_window > 0.0) || run.tube_window >= 0.5 * transition.tau) {
        throw ConfigError("[run].tube_window must lie in (0, tau/2)");
    }
    if (run.n_max < 1) throw ConfigError("[run].n_max must be >= 1");
    if (run.probes_per_ring < 4) throw ConfigError("[run].probes_per_ring must be >= 4");
}

std::string RunConfig::echo() const {
    std::ostringstream os;
    os << "[spectrum]\n";
    os << "C = " << format_double(spectrum.C) << "\n";
    os << "E = " << format_double(spectrum.E) << "\n";
    os << "alpha = " << format_double(spectrum.alpha) << "\n";
    os << "contrast_ok = " << (spectrum.contrast_ok ? "true" : "false") << "\n";
    os << "[transition]\n";
    os << "a11 = " << format_double(transition.A.a11) << "\n";
    os << "a12 = " << format_double(transition.A.a12) << "\n";
    os << "a21 = " << format_double(transition.A.a21) << "\n";
    os << "a22 = " << format_double(transition.A.a22) << "\n";
    os << "mu = " << format_double(transition.mu) << "\n";
    os << "tau = " << format_double(transition.tau) << "\n";
    os << "r_max = " << format_double(transition.r_max) << "\n";
    os << "[tolerances]\n";
    os << "bisection_rel_tol = " << format_double(tolerances.bisection_rel_tol) << "\n";
    os << "stable_tol = " << format_double(tolerances.stable_tol) << "\n";
    os << "underflow_floor = " << format_double(tolerances.underflow_floor) << "\n";
    os << "[run]\n";
    os << "seed = " << run.seed << "\n";
    os << "precision = " << to_string(run.precision) << "\n";
    os << "mantissa_bits = " << run.mantissa_bits << "\n";
    os << "tube_window = " << format_double(run.tube_window) << "\n";
    os << "n_max = " << run.n_max << "\n";
    os << "probes_per_ring = " << run.probes_per_ring << "\n";
    return os.str();
}

RealizeOptions RunConfig::realize_options(RealizeMode mode) const {
    RealizeOptions opt;
    opt.mode = mode;
    opt.precision = run.precision;
    opt.mantissa_bits = run.mantissa_bits;
    opt.probes_per_ring = run.probes_per_ring;
    opt.rel_tol = tolerances.bisection_rel_tol;
    return opt;
}

CrossingOptions RunConfig::crossing_options() const {
    CrossingOptions opt;
    opt.probes_per_ring = run.probes_per_ring;
    opt.rel_tol = tolerances.bisection_rel_tol;
    return opt;
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::string section;
    size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        const size_t nl = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(line_no) + ": unterminated section");
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section != "spectrum" && section != "transition" && section != "tolerances" &&
                section != "run") {
                throw ConfigError("unknown section [" + section + "]");
            }
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key{trim(line.substr(0, eq))};
        const std::string value{trim(line.substr(eq + 1))};
        const std::string path = "[" + section + "]." + key;
        if (section.empty()) {
            throw ConfigError("key '" + key + "' appears before any section");
        }

        if (section == "spectrum") {
            if (key == "C") {
                cfg.spectrum.C = parse_double(path, value);
            } else if (key == "E") {
                cfg.spectrum.E = parse_double(path, value);
            } else if (key == "alpha") {
                cfg.spectrum.alpha = parse_double(path, value);
            } else if (key == "contrast_ok") {
                cfg.spectrum.contrast_ok = parse_bool(path, value);
            } else {
                throw ConfigError("unknown key " + path);
            }
        } else if (section == "transition") {
            if (key == "a11") {
                cfg.transition.A.a11 = parse_double(path, value);
            } else if (key == "a12") {
                cfg.transition.A.a12 = parse_double(path, value);
            } else if (key == "a21") {
                cfg.transition.A.a21 = parse_double(path, value);
            } else if (key == "a22") {
                cfg.transition.A.a22 = parse_double(path, value);
            } else if (key == "mu") {
                cfg.transition.mu = parse_double(path, value);
            } else if (key == "tau") {
                cfg.transition.tau = parse_double(path, value);
            } else if (key == "r_max") {
                cfg.transition.r_max = parse_double(path, value);
            } else {
                throw ConfigError("unknown key " + path);
            }
        } else if (section == "tolerances") {
            if (key == "bisection_rel_tol") {
                cfg.tolerances.bisection_rel_tol = parse_double(path, value);
            } else if (key == "stable_tol") {
                cfg.tolerances.stable_tol = parse_double(path, value);
            } else if (key == "underflow_floor") {
                cfg.tolerances.underflow_floor = parse_double(path, value);
            } else {
                throw ConfigError("unknown key " + path);
            }
        } else {  // run
            if (key == "seed") {
                cfg.run.seed = parse_u64(path, value);
            } else if (key == "precision") {
                if (value == "binary64") {
                    cfg.run.precision = PrecisionKind::Binary64;
                } else if (value == "extended") {
                    cfg.run.precision = PrecisionKind::Extended;
                } else {
                    throw ConfigError(path + ": expected binary64 or extended");
                }
            } else if (key == "mantissa_bits") {
                cfg.run.mantissa_bits = parse_int(path, value);
            } else if (key == "tube_window") {
                cfg.run.tube_window = parse_double(path, value);
            } else if (key == "n_max") {
                cfg.run.n_max = parse_int(path, value);
            } else if (key == "probes_per_ring") {
                cfg.run.probes_per_ring = parse_int(path, value);
            } else {
                throw ConfigError("unknown key " + path);
            }
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace homnet
