#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rydswap/blockade.hpp"
#include "rydswap/dynamics.hpp"
#include "rydswap/gate.hpp"
#include "rydswap/target.hpp"
#include "rydswap/waveform.hpp"

namespace rydswap {

/// Search slots of one waveform: coefficients a_0..a_{n_terms-1}, real or
/// complex (a_0 is always real), each part bounded to [lower, upper] MHz.
struct SlotSpec {
    int n_terms = 1;
    bool complex = false;
    double lower = -100.0;
    double upper = 100.0;
};

struct SearchConstraints {
    bool tie_omegas = false;             // Omega1 := Omega0
    bool antisymmetric_detunings = false; // Delta1 := -Delta0
    bool constant_detunings = false;     // detunings keep only a_0
    bool resonant = false;               // Delta0 = Delta1 = 0
    /// Derive a_0 of each Rabi waveform so that Omega(0) = Omega(tau) = 0
    /// exactly; a_0 is then not a free parameter.
    bool pin_rabi_start = true;
};

struct PenaltyWeights {
    double boundary = 1e2;                       // per unit residual fraction
    double peak_rabi = 1e-3;                     // per rad/us above the cap
    double peak_rabi_cap = mhz_to_angular(300.0); // rad/us
};

struct SearchSpec {
    SlotSpec omega0{9, false, -100.0, 100.0};
    SlotSpec omega1{9, false, -100.0, 100.0};
    SlotSpec delta0{1, false, -30.0, 30.0};
    SlotSpec delta1{1, false, -30.0, 30.0};
    SearchConstraints constraints;
    std::optional<GateKind> target; // empty: score both SWAP formats, keep the better
    BlockadeModel blockade;
    PenaltyWeights penalties;
    PhaseConvention phase = PhaseConvention::pointwise;
    double tau = kDefaultTau;

    long budget = 200'000; // objective evaluations per restart
    int restarts = 8;
    std::uint64_t rng_seed = 0;
    /// A restart stops early once its best objective falls below this value;
    /// restarts with a higher index are then skipped (or cancelled), so the
    /// result is that of restarts 0..first success whatever the thread count.
    double stop_below = 0.0;
    /// Relaxed integrator tolerance used inside the objective.
    double search_rel_tol = 1e-8;
    /// Initial simplex edge as a fraction of each parameter's bound width.
    double initial_step_frac = 0.1;
    /// Warm start: every restart begins from this waveform (restart 0 exactly,
    /// later ones perturbed by one initial step).
    std::optional<WaveformSet> initial;
    /// When positive (and `initial` is set) each parameter is further boxed to
    /// within +-warm_window MHz of its warm-start value.
    double warm_window = 0.0;

    /// Throws std::invalid_argument when the spec has no free parameter, a
    /// non-positive budget or non-finite / inverted bounds.
    void validate() const;
};

/// Maps a flat parameter vector onto a WaveformSet according to a SearchSpec.
class ParameterLayout {
public:
    explicit ParameterLayout(const SearchSpec& spec);

    [[nodiscard]] std::size_t size() const { return slots_.size(); }
    [[nodiscard]] const std::vector<double>& lower() const { return lower_; }
    [[nodiscard]] const std::vector<double>& upper() const { return upper_; }

    [[nodiscard]] WaveformSet decode(std::span<const double> x) const;
    /// Reads the free slots out of a waveform set (missing terms read as 0).
    [[nodiscard]] std::vector<double> encode(const WaveformSet& ws) const;
    [[nodiscard]] std::vector<double> clamp(std::vector<double> x) const;

private:
    struct Slot {
        int waveform; // 0..3 = omega0, omega1, delta0, delta1
        int term;
        bool imag;
    };

    SearchSpec spec_;
    std::vector<Slot> slots_;
    std::vector<double> lower_;
    std::vector<double> upper_;
};

/// Gate error plus boundary and peak-Rabi penalties. Integration failures
/// return kObjectiveFailure instead of throwing.
inline constexpr double kObjectiveFailure = 1e3;

struct ObjectiveBreakdown {
    double total = kObjectiveFailure;
    double gate_error = 1.0;
    double boundary_penalty = 0.0;
    double peak_penalty = 0.0;
    GateKind target = GateKind::standard_swap;
};

ObjectiveBreakdown objective_breakdown(const WaveformSet& ws, const SearchSpec& spec);
double objective(std::span<const double> candidate, const SearchSpec& spec);

struct HistoryEntry {
    long evaluation = 0; // evaluations used by this restart so far
    int restart = 0;
    double best = 0.0;   // best objective so far within this restart
};

struct RestartSummary {
    int restart = 0;
    double best_objective = kObjectiveFailure;
    long evaluations = 0;
    std::vector<double> best_parameters;
    double wall_time_s = 0.0; // not part of the deterministic result
};

struct SearchResult {
    WaveformSet best_waveform;
    /// Gate error of best_waveform re-scored at full integrator tolerance.
    double best_error = 1.0;
    double best_objective = kObjectiveFailure;
    GateKind resolved_target = GateKind::standard_swap;
    std::vector<HistoryEntry> history;
    std::vector<RestartSummary> restarts;
    long evaluations_used = 0;
    bool budget_exhausted = false;
};

/// Bounded Nelder-Mead simplex minimiser with in-place restarts: when the
/// simplex collapses it is rebuilt around the incumbent until the budget runs
/// out. Points are projected onto the box before evaluation.
struct NelderMeadOptions {
    long max_evaluations = 1000;
    double f_tol = 1e-12;    // collapse test on the simplex value spread
    double x_tol_frac = 1e-7; // collapse test on the simplex extent (fraction of box)
    double initial_step_frac = 0.1;
    double stop_below = -std::numeric_limits<double>::infinity();
    /// Polled once per iteration; returning true ends the run.
    std::function<bool()> cancelled;
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    long evaluations = 0;
    std::vector<std::pair<long, double>> history; // (evaluations, best f)
};

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, const std::vector<double>& lower,
                             const std::vector<double>& upper, const NelderMeadOptions& opts);

/// Multi-start search. Restart i draws its start point from a stream seeded by
/// (rng_seed, i), so results do not depend on `threads` or scheduling.
SearchResult search(const SearchSpec& spec, int threads = 1);

/// Warm-started search from `base` that optimises for `target_blockade`.
/// Every Rabi coefficient and constant detuning of `base` is free within
/// +-window_mhz of its starting value.
struct RefitOptions {
    double window_mhz = 10.0;
    long budget = 20'000;
    int restarts = 1;
    std::uint64_t rng_seed = 0;
    double initial_step_mhz = 1.0;
    std::optional<GateKind> target;
    PhaseConvention phase = PhaseConvention::pointwise;
    double stop_below = 0.0;
};

SearchSpec refit_spec(const WaveformSet& base, const BlockadeModel& target_blockade,
                      const RefitOptions& opts);
SearchResult refit_for_blockade(const WaveformSet& base, const BlockadeModel& target_blockade,
                                const RefitOptions& opts = {}, int threads = 1);

/// Largest coefficient displacement |a - b| (MHz) over all four waveforms;
/// shorter series are zero-padded.
double coefficient_displacement(const WaveformSet& a, const WaveformSet& b);

} // namespace rydswap
