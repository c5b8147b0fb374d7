#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rydswap/blockade.hpp"
#include "rydswap/integrator.hpp"
#include "rydswap/waveform.hpp"

namespace rydswap {

using HamMatrix = Eigen::MatrixXcd;

/// How the relative phase Psi(t) between the two drives enters the triplet
/// couplings e^{+-i Psi}.
///
/// `pointwise`: Psi(t) = (Delta0(t) - Delta1(t)) * t, the triplet matrix as
///   printed with the instantaneous detunings substituted. This is the
///   convention under which the published hybrid-modulation waveform reaches
///   its quoted gate error.
/// `integrated`: Psi(t) = int_0^t (Delta0 - Delta1) ds. This is the convention
///   obtained from per-atom drives with time-dependent laser frequencies; only
///   under it does the 10-level product-basis model reproduce the
///   singlet/triplet split for time-dependent detunings.
///
/// Both coincide when the detunings are constant.
enum class PhaseConvention { pointwise, integrated };

std::string_view to_string(PhaseConvention c);
std::optional<PhaseConvention> parse_phase_convention(std::string_view name);

namespace basis {

// Singlet channel, ordered as in the V-type matrix: the ground singlet state
// (|01>-|10>)/sqrt2, then the antisymmetric Rydberg state reached by the
// Omega0 drive, (|r1>-|1r>)/sqrt2, then the one reached by Omega1,
// (|0r>-|r0>)/sqrt2.
enum Singlet : int { s_1m = 0, s_ryd0 = 1, s_ryd1 = 2 };
inline constexpr int kSingletDim = 3;

// Triplet channel. Ideal blockade keeps the first five.
enum Triplet : int { t_0 = 0, t_1p = 1, t_2 = 2, t_r0 = 3, t_r1 = 4, t_rr = 5, t_qq = 6 };

// Product basis. Ideal blockade keeps the first eight.
enum Product : int {
    p_00 = 0, p_01, p_10, p_11, p_0r, p_r0, p_1r, p_r1, p_rr, p_qq
};

int triplet_dim(const BlockadeModel& bm);
int full_dim(const BlockadeModel& bm);

std::vector<std::string> singlet_labels();
std::vector<std::string> triplet_labels(const BlockadeModel& bm);
std::vector<std::string> product_labels(const BlockadeModel& bm);

/// Unitary whose columns are the singlet states followed by the triplet
/// states, expanded over the product basis.
HamMatrix symmetry_basis(const BlockadeModel& bm);

/// True for basis indices that hold at least one Rydberg (or pair) excitation.
bool singlet_is_rydberg(int i);
bool triplet_is_rydberg(int i);
bool product_is_rydberg(int i);

} // namespace basis

/// Psi(t) for the chosen convention (rad).
double triplet_phase(const WaveformSet& ws, double t, PhaseConvention conv);
/// dPsi/dt (rad/us).
double triplet_phase_rate(const WaveformSet& ws, double t, PhaseConvention conv);

/// Per-laser phases theta_k(t) of the transition-frame couplings
/// (Omega_k/2) e^{-i theta_k}; theta0 - theta1 = Psi.
struct LaserPhases {
    double theta0 = 0.0;
    double theta1 = 0.0;
};
LaserPhases laser_phases(const WaveformSet& ws, double t, PhaseConvention conv);

/// (1/2)[[0, W0, W1], [W0*, 2D0, 0], [W1*, 0, 2D1]] in rad/us (hbar = 1).
HamMatrix h_singlet(const WaveformSet& ws, double t);

/// Triplet Hamiltonian with relative phase `phase` = Psi(t). 7x7 for a finite
/// blockade, 5x5 for the ideal one.
HamMatrix h_triplet(const WaveformSet& ws, const BlockadeModel& bm, double t, double phase);

/// The triplet Hamiltonian in the gauge without phase factors: amplitudes are
/// rephased by phi = (Psi, 0, -Psi, Psi, -Psi, 0, 0), which moves Psi' onto the
/// diagonal. Computational amplitudes map back as c = e^{-i phi(t)} c'.
HamMatrix h_triplet_phase_free(const WaveformSet& ws, const BlockadeModel& bm, double t,
                               double phase_rate);

/// Two-atom Hamiltonian over the product basis in the frame rotating at the
/// transition frequencies: H_a (x) 1 + 1 (x) H_a + Forster coupling, with
/// H_a = (W0/2) e^{-i theta0} |0><r| + (W1/2) e^{-i theta1} |1><r| + h.c.
HamMatrix h_full(const WaveformSet& ws, const BlockadeModel& bm, double t,
                 const LaserPhases& phases);

/// Generic Schrodinger integration i dpsi/dt = H(t) psi on [0, tau]. The
/// trajectory contains `samples` (t = 0 and t = tau are always included).
using HamiltonianBuilder = std::function<HamMatrix(double t)>;
Trajectory integrate(const HamiltonianBuilder& h, const StateVector& psi0, double tau,
                     const IntegratorConfig& cfg, std::span<const double> samples = {});

enum class Channel { singlet, triplet, triplet_phase_free, full };

struct EvolutionOptions {
    PhaseConvention phase = PhaseConvention::pointwise;
    IntegratorConfig integrator;
};

/// Hamiltonian builder for one channel of a waveform set.
HamiltonianBuilder make_builder(Channel channel, const WaveformSet& ws, const BlockadeModel& bm,
                                PhaseConvention phase);
int channel_dim(Channel channel, const BlockadeModel& bm);

/// Single-state trajectory for a channel.
Trajectory evolve(Channel channel, const WaveformSet& ws, const BlockadeModel& bm,
                  const StateVector& psi0, const EvolutionOptions& opts,
                  std::span<const double> samples = {});

/// Product-basis trajectory built by splitting psi0 (product basis) into its
/// singlet and triplet parts, evolving each channel and recombining. Unlike
/// Channel::full this is valid under both phase conventions; its
/// computational amplitudes agree with evaluate_gate's map. Rydberg amplitudes
/// are reported in the laser frame of Channel::full.
Trajectory evolve_product(const WaveformSet& ws, const BlockadeModel& bm, const StateVector& psi0,
                          const EvolutionOptions& opts, std::span<const double> samples = {});

/// Final states of several initial states propagated together (one column
/// each), plus int_0^tau P_rydberg dt per column.
struct Propagation {
    Eigen::MatrixXcd final_states;
    Eigen::VectorXd rydberg_time; // us
    IntegrationStats stats;
};

Propagation propagate(Channel channel, const WaveformSet& ws, const BlockadeModel& bm,
                      const Eigen::MatrixXcd& initial, const EvolutionOptions& opts);

/// Computational-state amplitudes (C_0, C_1+, C_2 rows) of the triplet
/// propagator for initial C_0, C_1+, C_2, evaluated in two gauges.
struct GaugeReport {
    Eigen::Matrix3cd explicit_phase;
    Eigen::Matrix3cd phase_free;
    double max_deviation = 0.0;
    double tolerance = 1e-8;
    bool agrees = false;
};

class GaugeInconsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evolves the triplet channel with explicit e^{+-i Psi} factors and in the
/// phase-free gauge. Throws GaugeInconsistencyError when they disagree by more
/// than `tolerance`.
GaugeReport gauge_transform_check(const WaveformSet& ws, const BlockadeModel& bm,
                                  const EvolutionOptions& opts, double tolerance = 1e-8);

} // namespace rydswap
