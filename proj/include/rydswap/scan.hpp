#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rydswap/blockade.hpp"
#include "rydswap/dynamics.hpp"
#include "rydswap/target.hpp"
#include "rydswap/waveform.hpp"

namespace rydswap {

enum class ScanAxisKind { rabi_ratio, detuning_offset, blockade_b };

/// Which waveform(s) an axis perturbs. `antisymmetric` applies +d to Delta0
/// and -d to Delta1 (keeps Delta0 + Delta1 fixed); it is only meaningful for
/// detuning offsets. Blockade axes ignore the selector.
enum class AxisApply { both, first, second, antisymmetric };

std::string_view to_string(ScanAxisKind k);
std::optional<ScanAxisKind> parse_scan_axis(std::string_view name);
std::string_view to_string(AxisApply a);
std::optional<AxisApply> parse_axis_apply(std::string_view name);

/// Grid values are in internal units: dimensionless ratios, rad/us for
/// detuning offsets and B.
struct ScanAxis {
    ScanAxisKind kind = ScanAxisKind::rabi_ratio;
    double min = 0.95;
    double max = 1.05;
    int points = 11;
    AxisApply apply = AxisApply::both;

    [[nodiscard]] std::vector<double> values() const;
    /// CSV column name, e.g. "rabi_ratio", "detuning_offset_mhz", "B_mhz".
    [[nodiscard]] std::string column() const;
    /// Grid value converted to the CSV unit (MHz for frequencies).
    [[nodiscard]] double display(double v) const;
};

/// Defaults: ratio [0.95, 1.05], offset 2pi [-2, 2] MHz, B 2pi [50, 500] MHz.
ScanAxis default_axis(ScanAxisKind kind, int points = 21);

struct ScanSpec {
    WaveformSet waveforms;
    std::string source = "custom"; // preset id or file name, for metadata
    BlockadeModel blockade;
    std::optional<GateKind> target = GateKind::standard_swap; // empty: auto
    EvolutionOptions evolution;
    std::vector<ScanAxis> axes;

    /// One or two axes, points >= 2, finite ranges, distinct (kind, apply)
    /// pairs, B >= 0. Throws std::invalid_argument.
    void validate() const;
};

struct ScanResult {
    std::vector<ScanAxis> axes;
    std::vector<std::vector<double>> values; // per axis
    /// Row-major over the axes (first axis outermost); NaN where the
    /// integration failed.
    std::vector<double> gate_error;
    std::vector<double> leakage;
    int failures = 0;

    [[nodiscard]] std::size_t index(std::size_t i, std::size_t j = 0) const;
    [[nodiscard]] std::string to_csv() const;
};

/// The waveform set and blockade model at one grid point.
struct ScanPoint {
    WaveformSet waveforms;
    BlockadeModel blockade;
};
ScanPoint apply_axis(const ScanAxis& axis, double value, ScanPoint base);

/// Evaluates every grid point; points run concurrently on `threads` workers
/// and the grid is assembled by index.
ScanResult run_scan(const ScanSpec& spec, int threads = 1);

/// Single-axis conveniences; throw std::invalid_argument if the spec's first
/// axis is of another kind.
ScanResult scan_rabi_ratio(const ScanSpec& spec, int threads = 1);
ScanResult scan_detuning_offset(const ScanSpec& spec, int threads = 1);
ScanResult scan_blockade(const ScanSpec& spec, int threads = 1);

} // namespace rydswap
