// rydswap: command-line front end for waveform presets, gate simulation,
// robustness scans and waveform search.
//
// Exit codes: 0 success, 2 usage or input error, 3 numerical failure.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rydswap/gate.hpp"
#include "rydswap/io.hpp"
#include "rydswap/optimize.hpp"
#include "rydswap/presets.hpp"
#include "rydswap/scan.hpp"

using namespace rydswap;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Globals {
    double tol_rel = 1e-10;
    double tol_abs = 1e-12;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::string phase = "pointwise";
    long max_steps = 2'000'000;
};

struct Source {
    std::string waveform_file;
    std::string preset;
    std::string blockade;
    std::string target;
};

struct Resolved {
    WaveformSet waveforms;
    std::string label;
    BlockadeModel blockade;
    std::optional<GateKind> target; // empty: auto
};

using Clock = std::chrono::steady_clock;

void add_source_options(CLI::App* cmd, Source& src, bool with_target) {
    auto* w = cmd->add_option("--waveform", src.waveform_file, "Waveform JSON file");
    auto* p = cmd->add_option("--preset", src.preset, "Preset id (see `presets list`)");
    w->excludes(p);
    p->excludes(w);
    cmd->add_option("--blockade", src.blockade,
                    "ideal | B_MHz | B_MHz,deltaq_MHz (default: preset's model, else ideal)");
    if (with_target) {
        cmd->add_option("--target", src.target,
                        "standard | opposite | auto (default: preset's format, else standard)");
    }
}

Resolved resolve(const Source& src, RunManifest& manifest) {
    Resolved r;
    if (!src.preset.empty()) {
        const Preset p = preset_lookup(src.preset);
        r.waveforms = p.waveforms;
        r.label = src.preset;
        r.blockade = p.blockade;
        r.target = p.target;
    } else if (!src.waveform_file.empty()) {
        const std::string text = read_text_file(src.waveform_file);
        manifest.add_input(src.waveform_file, text);
        r.waveforms = waveform_from_json(parse_json(text, src.waveform_file));
        r.label = src.waveform_file;
        r.target = GateKind::standard_swap;
    } else {
        throw InputError("one of --waveform or --preset is required");
    }
    if (!src.blockade.empty()) {
        r.blockade = parse_blockade_arg(src.blockade);
    }
    if (!src.target.empty()) {
        if (src.target == "auto") {
            r.target.reset();
        } else {
            const auto kind = parse_gate_kind(src.target);
            if (!kind || *kind == GateKind::custom) {
                throw InputError("--target must be standard, opposite or auto");
            }
            r.target = *kind;
        }
    }
    return r;
}

EvolutionOptions evolution(const Globals& g) {
    EvolutionOptions o;
    const auto phase = parse_phase_convention(g.phase);
    if (!phase) {
        throw InputError("--phase must be pointwise or integrated");
    }
    o.phase = *phase;
    o.integrator.rel_tol = g.tol_rel;
    o.integrator.abs_tol = g.tol_abs;
    o.integrator.max_steps = g.max_steps;
    try {
        o.integrator.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    return o;
}

json base_config(const Globals& g, const Resolved* r) {
    json c = {{"tol_rel", g.tol_rel}, {"tol_abs", g.tol_abs}, {"phase", g.phase},
              {"threads", g.threads}, {"max_steps", g.max_steps}};
    if (r != nullptr) {
        c["source"] = r->label;
        c["blockade"] = to_json(r->blockade);
        c["target"] = r->target ? std::string(to_string(*r->target)) : std::string("auto");
    }
    return c;
}

void finish_manifest(RunManifest& m, Clock::time_point start) {
    m.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_with_sidecar(const std::string& path, const std::string& text, const json& sidecar) {
    write_text_file(path, text);
    write_text_file(path + ".json", sidecar.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

int cmd_presets_list() {
    for (PresetId id : kAllPresets) {
        const Preset p = preset_lookup(id);
        std::cout << to_string(id) << "  target=" << to_string(p.target)
                  << (p.target_source == TargetSource::resolved ? " (resolved)" : "")
                  << "  blockade=" << p.blockade.describe() << "  " << p.description << "\n";
    }
    return kExitOk;
}

int cmd_presets_dump(const std::string& id, const std::string& out) {
    const Preset p = preset_lookup(id);
    const std::string text = to_json(p.waveforms).dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        write_text_file(out, text);
    }
    return kExitOk;
}

int cmd_fidelity(const Globals& g, const Source& src, std::optional<double> gamma_r) {
    const auto start = Clock::now();
    RunManifest m;
    m.subcommand = "fidelity";
    const Resolved r = resolve(src, m);
    const EvolutionOptions opts = evolution(g);
    const GateOutcome out =
        r.target ? evaluate_gate(r.waveforms, r.blockade, TargetGate::from_kind(*r.target), opts)
                 : evaluate_gate_auto(r.waveforms, r.blockade, opts);
    const BoundaryReport boundary = boundary_check(r.waveforms);

    json j = to_json(out);
    j["blockade"] = to_json(r.blockade);
    j["boundary_check_passes"] = boundary.passes;
    if (gamma_r) {
        const DecayEstimate d = decay_estimate(out, *gamma_r, r.waveforms.tau);
        j["decay"] = {{"gamma_r_per_us", d.gamma_r},
                      {"coarse_error", d.coarse_error},
                      {"integrated_error", d.integrated_error}};
    }
    m.config = base_config(g, &r);
    finish_manifest(m, start);
    j["manifest"] = to_json(m);
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

StateVector initial_state(const std::string& name, const BlockadeModel& bm) {
    const int n = basis::full_dim(bm);
    StateVector psi = StateVector::Zero(n);
    const std::vector<std::string> comp{"00", "01", "10", "11"};
    for (int k = 0; k < 4; ++k) {
        if (name == comp[static_cast<std::size_t>(k)]) {
            psi[k] = 1.0;
            return psi;
        }
    }
    const Eigen::MatrixXcd v = basis::symmetry_basis(bm);
    if (name == "singlet") {
        return v.col(basis::s_1m);
    }
    const std::string prefix = "triplet:";
    if (name.rfind(prefix, 0) == 0) {
        int k = -1;
        try {
            std::size_t used = 0;
            k = std::stoi(name.substr(prefix.size()), &used);
            if (used != name.size() - prefix.size()) {
                k = -1;
            }
        } catch (const std::exception&) {
            k = -1;
        }
        if (k < 0 || k >= basis::triplet_dim(bm)) {
            throw InputError("--initial triplet:<k> needs 0 <= k < " +
                             std::to_string(basis::triplet_dim(bm)));
        }
        return v.col(basis::kSingletDim + k);
    }
    throw InputError("--initial must be 00, 01, 10, 11, singlet or triplet:<k>");
}

int cmd_simulate(const Globals& g, const Source& src, const std::string& initial, int samples,
                 const std::string& out) {
    const auto start = Clock::now();
    RunManifest m;
    m.subcommand = "simulate";
    const Resolved r = resolve(src, m);
    const EvolutionOptions opts = evolution(g);
    if (samples < 2) {
        throw InputError("--samples must be >= 2");
    }
    const StateVector psi0 = initial_state(initial, r.blockade);
    const auto times = uniform_samples(0.0, r.waveforms.tau, samples);
    const Trajectory traj = evolve_product(r.waveforms, r.blockade, psi0, opts, times);

    const auto labels = basis::product_labels(r.blockade);
    std::string csv = "t_us";
    for (const auto& l : labels) {
        csv += ",pop_" + l;
    }
    for (const auto& l : labels) {
        csv += ",phase_" + l;
    }
    csv += "\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        csv += fmt(traj.times[k]);
        const StateVector& y = traj.states[k];
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            csv += "," + fmt(std::norm(y[i]));
        }
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            csv += "," + fmt(std::arg(y[i]));
        }
        csv += "\n";
    }

    m.config = base_config(g, &r);
    m.config["initial"] = initial;
    m.config["samples"] = samples;
    finish_manifest(m, start);
    if (out.empty()) {
        std::cout << csv;
    } else {
        write_with_sidecar(out, csv, {{"manifest", to_json(m)}});
    }
    return kExitOk;
}

ScanAxis parse_axis(const std::string& spec, const std::string& range) {
    const auto colon = spec.find(':');
    const auto kind = parse_scan_axis(spec.substr(0, colon));
    if (!kind) {
        throw InputError("--axis must be rabi_ratio, detuning_offset or B (optionally :both|first|second|antisymmetric)");
    }
    ScanAxis a = default_axis(*kind);
    if (colon != std::string::npos) {
        const auto apply = parse_axis_apply(spec.substr(colon + 1));
        if (!apply) {
            throw InputError("unknown axis selector in '" + spec + "'");
        }
        a.apply = *apply;
    }
    if (!range.empty()) {
        double lo = 0.0;
        double hi = 0.0;
        int n = 0;
        char tail = 0;
        if (std::sscanf(range.c_str(), "%lf:%lf:%d%c", &lo, &hi, &n, &tail) != 3) {
            throw InputError("--range must look like min:max:points, got '" + range + "'");
        }
        // Frequencies are given in MHz on the command line.
        const double unit = *kind == ScanAxisKind::rabi_ratio ? 1.0 : mhz_to_angular(1.0);
        a.min = lo * unit;
        a.max = hi * unit;
        a.points = n;
    }
    return a;
}

int cmd_scan(const Globals& g, const Source& src, const std::vector<std::string>& axes,
             const std::vector<std::string>& ranges, const std::string& out) {
    const auto start = Clock::now();
    RunManifest m;
    m.subcommand = "scan";
    const Resolved r = resolve(src, m);
    if (axes.empty() || axes.size() > 2) {
        throw InputError("scan needs one or two --axis options");
    }
    if (ranges.size() > axes.size()) {
        throw InputError("more --range options than --axis options");
    }
    ScanSpec spec;
    spec.waveforms = r.waveforms;
    spec.source = r.label;
    spec.blockade = r.blockade;
    spec.target = r.target;
    spec.evolution = evolution(g);
    for (std::size_t i = 0; i < axes.size(); ++i) {
        spec.axes.push_back(parse_axis(axes[i], i < ranges.size() ? ranges[i] : std::string{}));
    }
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    const ScanResult res = run_scan(spec, g.threads);
    if (res.failures > 0) {
        std::cerr << "warning: " << res.failures << " grid point(s) failed to integrate (NaN)\n";
    }
    m.config = base_config(g, &r);
    finish_manifest(m, start);
    const std::string csv = res.to_csv();
    if (out.empty()) {
        std::cout << csv;
    } else {
        write_with_sidecar(out, csv,
                           {{"scan", to_json(spec)},
                            {"failures", res.failures},
                            {"rows", res.gate_error.size()},
                            {"manifest", to_json(m)}});
    }
    return kExitOk;
}

int cmd_optimize(const Globals& g, const std::string& spec_path, const std::string& out,
                 const std::string& log) {
    const auto start = Clock::now();
    RunManifest m;
    m.subcommand = "optimize";
    const std::string text = read_text_file(spec_path);
    m.add_input(spec_path, text);
    SearchSpec spec = search_spec_from_json(parse_json(text, spec_path));
    if (g.seed) {
        spec.rng_seed = *g.seed;
    }
    const SearchResult res = search(spec, g.threads);

    m.config = base_config(g, nullptr);
    m.config["spec"] = to_json(spec);
    m.rng_seeds = {spec.rng_seed};
    finish_manifest(m, start);

    json summary = to_json(res);
    if (!out.empty()) {
        // The best-waveform file doubles as a waveform input for other subcommands.
        json best = to_json(res.best_waveform);
        best["search"] = summary;
        best["manifest"] = to_json(m);
        write_text_file(out, best.dump(2) + "\n");
    }
    if (!log.empty()) {
        std::string csv = "evaluation,restart,best_error\n";
        for (const auto& h : res.history) {
            csv += std::to_string(h.evaluation) + "," + std::to_string(h.restart) + "," + fmt(h.best) + "\n";
        }
        write_with_sidecar(log, csv, {{"manifest", to_json(m)}});
    }
    summary.erase("best_waveform");
    summary["manifest"] = to_json(m);
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rydberg-blockade SWAP gate waveform toolkit. Frequencies on the command line "
                 "are in MHz (converted to 2pi x MHz internally).",
                 "rydswap"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(RYDSWAP_VERSION));

    Globals g;
    app.add_option("--tol-rel", g.tol_rel, "Integrator relative tolerance")->capture_default_str();
    app.add_option("--tol-abs", g.tol_abs, "Integrator absolute tolerance")->capture_default_str();
    app.add_option("--seed", g.seed, "RNG seed for randomised subcommands (default 0)");
    app.add_option("--threads", g.threads, "Worker threads for scan/optimize")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--phase", g.phase, "Triplet phase convention: pointwise | integrated")
        ->capture_default_str();
    app.add_option("--max-steps", g.max_steps, "Integrator step budget")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    auto* presets = app.add_subcommand("presets", "List or export the published waveform sets");
    presets->require_subcommand(1);
    presets->add_subcommand("list", "List preset ids with target format and blockade model");
    auto* dump = presets->add_subcommand("dump", "Write a preset's waveform JSON");
    std::string dump_id;
    std::string dump_out;
    dump->add_option("id", dump_id, "Preset id")->required();
    dump->add_option("--out", dump_out, "Output file (default stdout)");

    auto* fid = app.add_subcommand("fidelity", "Evaluate gate fidelity as JSON");
    Source fid_src;
    std::optional<double> gamma_r;
    add_source_options(fid, fid_src, true);
    fid->add_option("--gamma-r", gamma_r, "Rydberg decay rate (1/us) for the decay estimate");

    auto* sim = app.add_subcommand("simulate", "Write a population/phase trajectory CSV");
    Source sim_src;
    std::string sim_initial = "01";
    int sim_samples = 501;
    std::string sim_out;
    add_source_options(sim, sim_src, false);
    sim->add_option("--initial", sim_initial, "00 | 01 | 10 | 11 | singlet | triplet:<k>")
        ->capture_default_str();
    sim->add_option("--samples", sim_samples, "Number of sample times")->capture_default_str();
    sim->add_option("--out", sim_out, "CSV output (default stdout)");

    auto* scan = app.add_subcommand("scan", "Gate error over a 1-D or 2-D perturbation grid");
    Source scan_src;
    std::vector<std::string> scan_axes;
    std::vector<std::string> scan_ranges;
    std::string scan_out;
    add_source_options(scan, scan_src, true);
    scan->add_option("--axis", scan_axes,
                     "rabi_ratio | detuning_offset | B, optionally :both|first|second|antisymmetric")
        ->required();
    scan->add_option("--range", scan_ranges, "min:max:points per axis (MHz for offsets and B)");
    scan->add_option("--out", scan_out, "CSV output (default stdout); a .json sidecar is written");

    auto* opt = app.add_subcommand("optimize", "Search for SWAP waveforms");
    std::string opt_spec;
    std::string opt_out;
    std::string opt_log;
    opt->add_option("--spec", opt_spec, "Search spec JSON")->required();
    opt->add_option("--out", opt_out, "Best waveform JSON");
    opt->add_option("--log", opt_log, "History CSV (evaluation,restart,best_error)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (presets->parsed()) {
            if (dump->parsed()) {
                return cmd_presets_dump(dump_id, dump_out);
            }
            return cmd_presets_list();
        }
        if (fid->parsed()) {
            return cmd_fidelity(g, fid_src, gamma_r);
        }
        if (sim->parsed()) {
            return cmd_simulate(g, sim_src, sim_initial, sim_samples, sim_out);
        }
        if (scan->parsed()) {
            return cmd_scan(g, scan_src, scan_axes, scan_ranges, scan_out);
        }
        if (opt->parsed()) {
            return cmd_optimize(g, opt_spec, opt_out, opt_log);
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IntegrationError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
