#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace homnet {

// Flat record for JSON-lines / CSV emission. Field order is part of the
// schema and must be identical across the records of one stream.
using Value = std::variant<double, std::int64_t, std::uint64_t, bool, std::string>;

struct Record {
    std::vector<std::pair<std::string, Value>> fields;

    Record& add(std::string name, Value v) {
        fields.emplace_back(std::move(name), std::move(v));
        return *this;
    }
};

enum class RecordFormat { Jsonl, Csv };

// Doubles print with 17 significant digits so binary64 payloads survive a
// parse round trip bit-exactly.
std::string format_double(double v);

// Serialize the stream; throws InternalError when records disagree on the
// schema. CSV always starts with the header row.
void emit_records(const std::vector<Record>& records, RecordFormat format, std::ostream& out);
std::string emit_records_string(const std::vector<Record>& records, RecordFormat format);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

struct RunManifest {
    std::string artifact = "homnet";
    std::string version = "0.1.0";
    std::string command;
    std::string timestamp;  // excluded from determinism comparisons
    std::string config_echo;
    std::string precision = "binary64";
    std::string input_digest;
    std::string output_digest;
    std::uint64_t record_count = 0;

    std::string to_json() const;
};

}  // namespace homnet
