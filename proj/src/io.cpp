#include "rydswap/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rydswap {

namespace {

std::size_t line_of(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> known,
                         std::string_view where) {
    for (const auto& item : j.items()) {
        if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
            throw InputError(std::string(where) + ": unknown key '" + item.key() + "'");
        }
    }
}

const json& require(const json& j, std::string_view key, std::string_view where) {
    if (!j.is_object() || !j.contains(key)) {
        throw InputError(std::string(where) + ": missing '" + std::string(key) + "'");
    }
    return j.at(key);
}

double number(const json& j, std::string_view what) {
    if (!j.is_number()) {
        throw InputError(std::string(what) + ": expected a number");
    }
    return j.get<double>();
}

bool boolean(const json& j, std::string_view what) {
    if (!j.is_boolean()) {
        throw InputError(std::string(what) + ": expected true or false");
    }
    return j.get<bool>();
}

template <class T>
T integer(const json& j, std::string_view what) {
    if (!j.is_number_integer()) {
        throw InputError(std::string(what) + ": expected an integer");
    }
    return j.get<T>();
}

double parse_double(std::string_view s, std::string_view what) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || s.empty()) {
        throw InputError(std::string(what) + ": cannot parse '" + std::string(s) + "'");
    }
    return v;
}

json slot_to_json(const SlotSpec& s) {
    return {{"n_terms", s.n_terms}, {"complex", s.complex}, {"lower", s.lower}, {"upper", s.upper}};
}

SlotSpec slot_from_json(const json& j, std::string_view where) {
    if (!j.is_object()) {
        throw InputError(std::string(where) + ": expected an object");
    }
    reject_unknown_keys(j, {"n_terms", "complex", "lower", "upper"}, where);
    SlotSpec s;
    if (j.contains("n_terms")) s.n_terms = integer<int>(j["n_terms"], "n_terms");
    if (j.contains("complex")) s.complex = boolean(j["complex"], "complex");
    if (j.contains("lower")) s.lower = number(j["lower"], "lower");
    if (j.contains("upper")) s.upper = number(j["upper"], "upper");
    return s;
}

} // namespace

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(std::string_view text, std::string_view source) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const std::size_t line = line_of(text, e.byte == 0 ? 0 : e.byte - 1);
        throw InputError(std::string(source) + ":" + std::to_string(line) + ": malformed JSON (" +
                             e.what() + ")",
                         line);
    }
}

json read_json_file(const std::filesystem::path& path) {
    return parse_json(read_text_file(path), path.string());
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write '" + path.string() + "'");
    }
    out << text;
    if (!out) {
        throw InputError("write failed for '" + path.string() + "'");
    }
}

json to_json(const FourierSeries& s) {
    json coeffs = json::array();
    for (const cplx& c : s.coeffs()) {
        coeffs.push_back({c.real(), c.imag()});
    }
    return {{"coeffs", coeffs}};
}

json to_json(const WaveformSet& ws) {
    return {{"tau_us", ws.tau},
            {"omega0", to_json(ws.omega0)},
            {"omega1", to_json(ws.omega1)},
            {"delta0", to_json(ws.delta0)},
            {"delta1", to_json(ws.delta1)}};
}

FourierSeries series_from_json(const json& j, std::string_view field) {
    const std::string where(field);
    const json& coeffs = require(j, "coeffs", where);
    if (!coeffs.is_array() || coeffs.empty()) {
        throw InputError(where + ".coeffs: expected a non-empty array");
    }
    std::vector<cplx> out;
    for (const json& c : coeffs) {
        // A bare number is accepted as a real coefficient.
        if (c.is_number()) {
            out.emplace_back(c.get<double>(), 0.0);
        } else if (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number()) {
            out.emplace_back(c[0].get<double>(), c[1].get<double>());
        } else {
            throw InputError(where + ".coeffs: each entry must be [re, im]");
        }
    }
    try {
        return FourierSeries(std::move(out));
    } catch (const std::invalid_argument& e) {
        throw InputError(where + ": " + e.what());
    }
}

WaveformSet waveform_from_json(const json& j) {
    if (!j.is_object()) {
        throw InputError("waveform: expected a JSON object");
    }
    WaveformSet ws;
    if (j.contains("tau_us")) {
        ws.tau = number(j["tau_us"], "tau_us");
    }
    ws.omega0 = series_from_json(require(j, "omega0", "waveform"), "omega0");
    ws.omega1 = series_from_json(require(j, "omega1", "waveform"), "omega1");
    ws.delta0 = series_from_json(require(j, "delta0", "waveform"), "delta0");
    ws.delta1 = series_from_json(require(j, "delta1", "waveform"), "delta1");
    try {
        ws.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    return ws;
}

WaveformSet read_waveform_file(const std::filesystem::path& path) {
    return waveform_from_json(read_json_file(path));
}

json to_json(const BlockadeModel& bm) {
    if (bm.is_ideal()) {
        return "ideal";
    }
    return {{"B_mhz", angular_to_mhz(bm.b)}, {"delta_q_mhz", angular_to_mhz(bm.delta_q)}};
}

BlockadeModel blockade_from_json(const json& j) {
    if (j.is_string()) {
        return parse_blockade_arg(j.get<std::string>());
    }
    if (!j.is_object()) {
        throw InputError("blockade: expected \"ideal\" or {\"B_mhz\": .., \"delta_q_mhz\": ..}");
    }
    reject_unknown_keys(j, {"B_mhz", "delta_q_mhz"}, "blockade");
    const double b = number(require(j, "B_mhz", "blockade"), "B_mhz");
    const double dq = j.contains("delta_q_mhz") ? number(j["delta_q_mhz"], "delta_q_mhz") : 0.0;
    try {
        return BlockadeModel::finite_mhz(b, dq);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

BlockadeModel parse_blockade_arg(std::string_view text) {
    if (text == "ideal") {
        return BlockadeModel::ideal();
    }
    const auto comma = text.find(',');
    const double b = parse_double(text.substr(0, comma), "blockade B");
    const double dq =
        comma == std::string_view::npos ? 0.0 : parse_double(text.substr(comma + 1), "blockade dq");
    try {
        return BlockadeModel::finite_mhz(b, dq);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

json to_json(const GateOutcome& g) {
    json map = json::array();
    for (int r = 0; r < 4; ++r) {
        json row = json::array();
        for (int c = 0; c < 4; ++c) {
            row.push_back({g.actual_map(r, c).real(), g.actual_map(r, c).imag()});
        }
        map.push_back(row);
    }
    return {{"target", to_string(g.target)},
            {"fidelity", g.fidelity},
            {"gate_error", g.gate_error},
            {"leakage", g.leakage},
            {"integrated_rydberg_population_us", g.integrated_rydberg_population},
            {"actual_map", map}};
}

json to_json(const SearchSpec& spec) {
    json j;
    j["free_parameters"] = {{"omega0", slot_to_json(spec.omega0)},
                            {"omega1", slot_to_json(spec.omega1)},
                            {"delta0", slot_to_json(spec.delta0)},
                            {"delta1", slot_to_json(spec.delta1)}};
    const auto& c = spec.constraints;
    j["constraints"] = {{"tie_omegas", c.tie_omegas},
                        {"antisymmetric_detunings", c.antisymmetric_detunings},
                        {"constant_detunings", c.constant_detunings},
                        {"resonant", c.resonant},
                        {"pin_rabi_start", c.pin_rabi_start}};
    j["target"] = spec.target ? std::string(to_string(*spec.target)) : std::string("auto");
    j["blockade"] = to_json(spec.blockade);
    j["penalty_weights"] = {{"boundary", spec.penalties.boundary},
                            {"peak_rabi", spec.penalties.peak_rabi},
                            {"peak_rabi_cap_mhz", angular_to_mhz(spec.penalties.peak_rabi_cap)}};
    j["phase"] = to_string(spec.phase);
    j["tau_us"] = spec.tau;
    j["budget"] = spec.budget;
    j["restarts"] = spec.restarts;
    j["rng_seed"] = spec.rng_seed;
    j["stop_below"] = spec.stop_below;
    j["search_rel_tol"] = spec.search_rel_tol;
    j["initial_step_frac"] = spec.initial_step_frac;
    if (spec.initial) {
        j["initial"] = to_json(*spec.initial);
    }
    j["warm_window_mhz"] = spec.warm_window;
    return j;
}

SearchSpec search_spec_from_json(const json& j) {
    if (!j.is_object()) {
        throw InputError("search spec: expected a JSON object");
    }
    reject_unknown_keys(j,
                        {"free_parameters", "constraints", "target", "blockade", "penalty_weights",
                         "phase", "tau_us", "budget", "restarts", "rng_seed", "stop_below",
                         "search_rel_tol", "initial_step_frac", "initial", "warm_window_mhz"},
                        "search spec");
    SearchSpec s;
    if (j.contains("free_parameters")) {
        const json& fp = j["free_parameters"];
        if (!fp.is_object()) {
            throw InputError("free_parameters: expected an object");
        }
        reject_unknown_keys(fp, {"omega0", "omega1", "delta0", "delta1"}, "free_parameters");
        if (fp.contains("omega0")) s.omega0 = slot_from_json(fp["omega0"], "omega0");
        if (fp.contains("omega1")) s.omega1 = slot_from_json(fp["omega1"], "omega1");
        if (fp.contains("delta0")) s.delta0 = slot_from_json(fp["delta0"], "delta0");
        if (fp.contains("delta1")) s.delta1 = slot_from_json(fp["delta1"], "delta1");
    }
    if (j.contains("constraints")) {
        const json& c = j["constraints"];
        if (!c.is_object()) {
            throw InputError("constraints: expected an object");
        }
        reject_unknown_keys(c,
                            {"tie_omegas", "antisymmetric_detunings", "constant_detunings",
                             "resonant", "pin_rabi_start"},
                            "constraints");
        auto& k = s.constraints;
        if (c.contains("tie_omegas")) k.tie_omegas = boolean(c["tie_omegas"], "tie_omegas");
        if (c.contains("antisymmetric_detunings"))
            k.antisymmetric_detunings = boolean(c["antisymmetric_detunings"], "antisymmetric_detunings");
        if (c.contains("constant_detunings"))
            k.constant_detunings = boolean(c["constant_detunings"], "constant_detunings");
        if (c.contains("resonant")) k.resonant = boolean(c["resonant"], "resonant");
        if (c.contains("pin_rabi_start")) k.pin_rabi_start = boolean(c["pin_rabi_start"], "pin_rabi_start");
    }
    if (j.contains("target")) {
        if (!j["target"].is_string()) {
            throw InputError("target: expected \"standard\", \"opposite\" or \"auto\"");
        }
        const std::string t = j["target"].get<std::string>();
        if (t != "auto") {
            const auto kind = parse_gate_kind(t);
            if (!kind || *kind == GateKind::custom) {
                throw InputError("target: expected \"standard\", \"opposite\" or \"auto\"");
            }
            s.target = *kind;
        }
    }
    if (j.contains("blockade")) s.blockade = blockade_from_json(j["blockade"]);
    if (j.contains("penalty_weights")) {
        const json& p = j["penalty_weights"];
        if (!p.is_object()) {
            throw InputError("penalty_weights: expected an object");
        }
        reject_unknown_keys(p, {"boundary", "peak_rabi", "peak_rabi_cap_mhz"}, "penalty_weights");
        if (p.contains("boundary")) s.penalties.boundary = number(p["boundary"], "boundary");
        if (p.contains("peak_rabi")) s.penalties.peak_rabi = number(p["peak_rabi"], "peak_rabi");
        if (p.contains("peak_rabi_cap_mhz"))
            s.penalties.peak_rabi_cap = mhz_to_angular(number(p["peak_rabi_cap_mhz"], "peak_rabi_cap_mhz"));
    }
    if (j.contains("phase")) {
        const auto ph = j["phase"].is_string() ? parse_phase_convention(j["phase"].get<std::string>())
                                               : std::nullopt;
        if (!ph) {
            throw InputError("phase: expected \"pointwise\" or \"integrated\"");
        }
        s.phase = *ph;
    }
    if (j.contains("tau_us")) s.tau = number(j["tau_us"], "tau_us");
    if (j.contains("budget")) s.budget = integer<long>(j["budget"], "budget");
    if (j.contains("restarts")) s.restarts = integer<int>(j["restarts"], "restarts");
    if (j.contains("rng_seed")) s.rng_seed = integer<std::uint64_t>(j["rng_seed"], "rng_seed");
    if (j.contains("stop_below")) s.stop_below = number(j["stop_below"], "stop_below");
    if (j.contains("search_rel_tol")) s.search_rel_tol = number(j["search_rel_tol"], "search_rel_tol");
    if (j.contains("initial_step_frac"))
        s.initial_step_frac = number(j["initial_step_frac"], "initial_step_frac");
    if (j.contains("initial")) s.initial = waveform_from_json(j["initial"]);
    if (j.contains("warm_window_mhz")) s.warm_window = number(j["warm_window_mhz"], "warm_window_mhz");
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("search spec: ") + e.what());
    }
    return s;
}

json to_json(const SearchResult& r) {
    json restarts = json::array();
    for (const auto& rs : r.restarts) {
        restarts.push_back({{"restart", rs.restart},
                            {"best_objective", rs.best_objective},
                            {"evaluations", rs.evaluations},
                            {"wall_time_s", rs.wall_time_s}});
    }
    return {{"best_error", r.best_error},
            {"best_objective", r.best_objective},
            {"resolved_target", to_string(r.resolved_target)},
            {"evaluations_used", r.evaluations_used},
            {"budget_exhausted", r.budget_exhausted},
            {"restarts", restarts},
            {"best_waveform", to_json(r.best_waveform)}};
}

json to_json(const ScanAxis& a) {
    return {{"kind", to_string(a.kind)},
            {"apply", to_string(a.apply)},
            {"column", a.column()},
            {"min", a.display(a.min)},
            {"max", a.display(a.max)},
            {"points", a.points}};
}

json to_json(const ScanSpec& spec) {
    json axes = json::array();
    for (const auto& a : spec.axes) {
        axes.push_back(to_json(a));
    }
    return {{"source", spec.source},
            {"blockade", to_json(spec.blockade)},
            {"target", spec.target ? std::string(to_string(*spec.target)) : std::string("auto")},
            {"phase", to_string(spec.evolution.phase)},
            {"rel_tol", spec.evolution.integrator.rel_tol},
            {"abs_tol", spec.evolution.integrator.abs_tol},
            {"axes", axes},
            {"waveform", to_json(spec.waveforms)}};
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void RunManifest::add_input(const std::filesystem::path& path, std::string_view contents) {
    input_hashes.emplace_back(path.string(), hex64(fnv1a64(contents)));
}

json to_json(const RunManifest& m) {
    json inputs = json::object();
    for (const auto& [path, hash] : m.input_hashes) {
        inputs[path] = "fnv1a64:" + hash;
    }
    return {{"subcommand", m.subcommand},
            {"config", m.config},
            {"input_hashes", inputs},
            {"code_version", m.code_version},
            {"rng_seeds", m.rng_seeds},
            {"wall_time_s", m.wall_time_s}};
}

} // namespace rydswap
