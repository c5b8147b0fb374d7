#include "rydswap/presets.hpp"

namespace rydswap {

namespace {

using C = cplx;

FourierSeries real_series(std::initializer_list<double> values) {
    std::vector<cplx> out;
    out.reserve(values.size());
    for (double v : values) {
        out.emplace_back(v, 0.0);
    }
    return FourierSeries(std::move(out));
}

Preset make_fig2_hybrid() {
    WaveformSet ws;
    ws.omega0 = real_series({66.26, -20.40, -4.41, -12.61, -1.47, 5.76});
    ws.omega1 = ws.omega0;
    ws.delta0 = FourierSeries({C{-13.37, 0.0}, C{-21.68, -19.43}, C{-10.79, -19.20},
                               C{-25.28, -33.11}, C{-45.53, -20.21}, C{-8.44, 1.27}});
    ws.delta1 = FourierSeries({C{54.53, 0.0}, C{-9.77, -16.65}, C{-12.84, -11.28},
                               C{46.29, -34.26}, C{-11.51, -31.76}, C{-4.05, 2.88}});
    return {PresetId::fig2_hybrid, ws, BlockadeModel::ideal(), GateKind::standard_swap,
            TargetSource::published,
            "hybrid amplitude+frequency modulation, Omega0=Omega1, ideal blockade"};
}

Preset make_fig3_amplitude_offres() {
    WaveformSet ws;
    ws.omega0 = real_series({199.45, -59.56, -34.98, 32.30, 6.86, -11.85, -6.17, -17.72, -8.61});
    ws.omega1 = real_series({206.49, -55.67, -48.16, 27.76, 11.52, -3.03, -2.06, -25.43, -8.19});
    ws.delta0 = FourierSeries::constant_mhz(9.05);
    ws.delta1 = FourierSeries::constant_mhz(-9.34);
    return {PresetId::fig3_amplitude_offres, ws, BlockadeModel::ideal(),
            GateKind::standard_swap, TargetSource::published,
            "amplitude-only modulation, off-resonant constant detunings, ideal blockade "
            "(standard SWAP up to a global phase)"};
}

Preset make_fig3_variant_b125() {
    WaveformSet ws;
    ws.omega0 = real_series({201.72, -60.68, -35.18, 33.33, 6.14, -11.66, -6.12, -18.53, -8.16});
    ws.omega1 = real_series({208.18, -57.17, -47.92, 28.42, 11.19, -3.41, -1.91, -24.41, -8.89});
    ws.delta0 = FourierSeries::constant_mhz(9.07);
    ws.delta1 = FourierSeries::constant_mhz(-9.38);
    return {PresetId::fig3_variant_B125, ws, BlockadeModel::finite_mhz(125.0, 0.0),
            GateKind::standard_swap, TargetSource::published,
            "amplitude-only variant tailored for finite blockade B=2pi x 125 MHz, dq=0"};
}

Preset make_figA2_resonant() {
    WaveformSet ws;
    ws.omega0 = real_series(
        {250.95, -51.38, -51.18, 25.85, -32.11, -12.74, 24.64, -21.83, 11.38, -18.10});
    ws.omega1 = real_series(
        {286.47, -20.74, -13.46, -55.45, 30.51, -27.91, 12.23, -49.65, -43.50, 24.74});
    ws.delta0 = FourierSeries::constant_mhz(0.0);
    ws.delta1 = FourierSeries::constant_mhz(0.0);
    // Format resolved by scoring both SWAP formats: opposite wins (~1e-6 vs 0.8).
    return {PresetId::figA2_resonant, ws, BlockadeModel::ideal(), GateKind::opposite_swap,
            TargetSource::resolved, "amplitude-only modulation, resonant drives, ideal blockade"};
}

Preset make_figA3_symmetric_b100() {
    WaveformSet ws;
    ws.omega0 = real_series({191.04, -89.66, -18.38, 37.37, -22.13, 4.32, 4.10, -11.15});
    ws.omega1 = ws.omega0;
    ws.delta0 = FourierSeries::constant_mhz(-12.48);
    ws.delta1 = FourierSeries::constant_mhz(12.48);
    // Format resolved by scoring both SWAP formats: standard wins (~1e-6 vs 0.8).
    return {PresetId::figA3_symmetric_B100, ws, BlockadeModel::finite_mhz(100.0, 0.0),
            GateKind::standard_swap, TargetSource::resolved,
            "amplitude-only modulation, Omega0=Omega1, Delta0+Delta1=0, B=2pi x 100 MHz"};
}

} // namespace

std::string_view to_string(PresetId id) {
    switch (id) {
    case PresetId::fig2_hybrid:
        return "fig2_hybrid";
    case PresetId::fig3_amplitude_offres:
        return "fig3_amplitude_offres";
    case PresetId::fig3_variant_B125:
        return "fig3_variant_B125";
    case PresetId::figA2_resonant:
        return "figA2_resonant";
    case PresetId::figA3_symmetric_B100:
        return "figA3_symmetric_B100";
    }
    return "unknown";
}

std::optional<PresetId> parse_preset_id(std::string_view name) {
    for (PresetId id : kAllPresets) {
        if (to_string(id) == name) {
            return id;
        }
    }
    return std::nullopt;
}

Preset preset_lookup(PresetId id) {
    switch (id) {
    case PresetId::fig2_hybrid:
        return make_fig2_hybrid();
    case PresetId::fig3_amplitude_offres:
        return make_fig3_amplitude_offres();
    case PresetId::fig3_variant_B125:
        return make_fig3_variant_b125();
    case PresetId::figA2_resonant:
        return make_figA2_resonant();
    case PresetId::figA3_symmetric_B100:
        return make_figA3_symmetric_b100();
    }
    throw UnknownPresetError(std::to_string(static_cast<int>(id)));
}

Preset preset_lookup(std::string_view name) {
    const auto id = parse_preset_id(name);
    if (!id) {
        throw UnknownPresetError(std::string(name));
    }
    return preset_lookup(*id);
}

} // namespace rydswap
