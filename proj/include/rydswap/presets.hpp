#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rydswap/blockade.hpp"
#include "rydswap/target.hpp"
#include "rydswap/waveform.hpp"

namespace rydswap {

enum class PresetId {
    fig2_hybrid,
    fig3_amplitude_offres,
    fig3_variant_B125,
    figA2_resonant,
    figA3_symmetric_B100,
};

inline constexpr std::array<PresetId, 5> kAllPresets{
    PresetId::fig2_hybrid,    PresetId::fig3_amplitude_offres, PresetId::fig3_variant_B125,
    PresetId::figA2_resonant, PresetId::figA3_symmetric_B100,
};

std::string_view to_string(PresetId id);
std::optional<PresetId> parse_preset_id(std::string_view name);

/// Where a preset's target format comes from: stated alongside the published
/// coefficients, or resolved by scoring both SWAP formats (see
/// evaluate_gate_auto) and recording the winner here.
enum class TargetSource { published, resolved };

struct Preset {
    PresetId id;
    WaveformSet waveforms;
    BlockadeModel blockade;
    GateKind target;
    TargetSource target_source;
    std::string description;
};

class UnknownPresetError : public std::invalid_argument {
public:
    explicit UnknownPresetError(const std::string& name)
        : std::invalid_argument("unknown preset '" + name + "'") {}
};

/// Published coefficient sets, stored verbatim as printed (MHz).
Preset preset_lookup(PresetId id);
/// Throws UnknownPresetError for names outside the registry.
Preset preset_lookup(std::string_view name);

} // namespace rydswap
