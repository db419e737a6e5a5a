#include "homnet/records.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "homnet/errors.hpp"

namespace homnet {

namespace {

void json_escape(const std::string& s, std::ostream& out) {
    out << '"';
    for (char c : s) {
        switch (c) {
            case '"': out << "\\\""; break;
            case '\\': out << "\\\\"; break;
            case '\n': out << "\\n"; break;
            case '\t': out << "\\t"; break;
            case '\r': out << "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out << buf;
                } else {
                    out << c;
                }
        }
    }
    out << '"';
}

void write_value(const Value& v, RecordFormat format, std::ostream& out) {
    if (std::holds_alternative<double>(v)) {
        const double d = std::get<double>(v);
        if (!std::isfinite(d)) {
            out << (format == RecordFormat::Jsonl ? "null" : "nan");
        } else {
            out << format_double(d);
        }
    } else if (std::holds_alternative<std::int64_t>(v)) {
        out << std::get<std::int64_t>(v);
    } else if (std::holds_alternative<std::uint64_t>(v)) {
        out << std::get<std::uint64_t>(v);
    } else if (std::holds_alternative<bool>(v)) {
        out << (std::get<bool>(v) ? "true" : "false");
    } else {
        const auto& s = std::get<std::string>(v);
        if (format == RecordFormat::Jsonl) {
            json_escape(s, out);
        } else {
            const bool quote = s.find_first_of(",\"\n") != std::string::npos;
            if (!quote) {
                out << s;
            } else {
                out << '"';
                for (char c : s) {
                    if (c == '"') out << '"';
                    out << c;
                }
                out << '"';
            }
        }
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit_records(const std::vector<Record>& records, RecordFormat format, std::ostream& out) {
    if (records.empty()) return;
    const auto& first = records.front().fields;
    for (const auto& r : records) {
        if (r.fields.size() != first.size()) {
            throw InternalError("record stream mixes schemas (field count)");
        }
        for (size_t i = 0; i < first.size(); ++i) {
            if (r.fields[i].first != first[i].first) {
                throw InternalError("record stream mixes schemas (field '" +
                                    r.fields[i].first + "' vs '" + first[i].first + "')");
            }
        }
    }
    if (format == RecordFormat::Csv) {
        for (size_t i = 0; i < first.size(); ++i) {
            if (i) out << ',';
            out << first[i].first;
        }
        out << '\n';
        for (const auto& r : records) {
            for (size_t i = 0; i < r.fields.size(); ++i) {
                if (i) out << ',';
                write_value(r.fields[i].second, format, out);
            }
            out << '\n';
        }
        return;
    }
    for (const auto& r : records) {
        out << '{';
        for (size_t i = 0; i < r.fields.size(); ++i) {
            if (i) out << ',';
            json_escape(r.fields[i].first, out);
            out << ':';
            write_value(r.fields[i].second, format, out);
        }
        out << "}\n";
    }
}

std::string emit_records_string(const std::vector<Record>& records, RecordFormat format) {
    std::ostringstream os;
    emit_records(records, format, os);
    return os.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["artifact"] = artifact;
    j["version"] = version;
    j["command"] = command;
    j["timestamp"] = timestamp;
    j["precision"] = precision;
    j["config"] = config_echo;
    j["input_digest"] = input_digest;
    j["output"] = {{"records", record_count}, {"digest", output_digest}};
    return j.dump(2);
}

}  // namespace homnet
