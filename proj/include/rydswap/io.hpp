#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rydswap/blockade.hpp"
#include "rydswap/gate.hpp"
#include "rydswap/optimize.hpp"
#include "rydswap/scan.hpp"
#include "rydswap/waveform.hpp"

namespace rydswap {

using json = nlohmann::ordered_json;

/// Malformed or unreadable user input. `line` is 1-based when known.
class InputError : public std::runtime_error {
public:
    InputError(const std::string& what, std::optional<std::size_t> line = std::nullopt)
        : std::runtime_error(what), line_(line) {}
    [[nodiscard]] std::optional<std::size_t> line() const { return line_; }

private:
    std::optional<std::size_t> line_;
};

std::string read_text_file(const std::filesystem::path& path);
/// Parses JSON text; syntax errors become InputError carrying the line number.
json parse_json(std::string_view text, std::string_view source = "<input>");
json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Waveform file format: {"tau_us": .., "omega0": {"coeffs": [[re, im], ..]}, ..}
json to_json(const FourierSeries& s);
json to_json(const WaveformSet& ws);
FourierSeries series_from_json(const json& j, std::string_view field);
WaveformSet waveform_from_json(const json& j);
WaveformSet read_waveform_file(const std::filesystem::path& path);

/// "ideal" or {"B_mhz": .., "delta_q_mhz": ..}.
json to_json(const BlockadeModel& bm);
BlockadeModel blockade_from_json(const json& j);
/// CLI form: "ideal", "<B_MHz>" or "<B_MHz>,<deltaq_MHz>".
BlockadeModel parse_blockade_arg(std::string_view text);

json to_json(const GateOutcome& g);

/// Every SearchSpec field has a key; all keys are optional and default to the
/// SearchSpec defaults. Unknown keys are rejected.
json to_json(const SearchSpec& spec);
SearchSpec search_spec_from_json(const json& j);
json to_json(const SearchResult& r);

/// Axis ranges are written in CSV units (MHz for frequencies).
json to_json(const ScanAxis& a);
json to_json(const ScanSpec& spec);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

struct RunManifest {
    std::string subcommand;
    json config = json::object();
    std::vector<std::pair<std::string, std::string>> input_hashes; // (path, fnv1a64)
    std::string code_version = RYDSWAP_VERSION;
    std::vector<std::uint64_t> rng_seeds;
    double wall_time_s = 0.0;

    void add_input(const std::filesystem::path& path, std::string_view contents);
};

json to_json(const RunManifest& m);

} // namespace rydswap
