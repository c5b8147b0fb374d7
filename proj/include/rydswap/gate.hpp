#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

#include "rydswap/blockade.hpp"
#include "rydswap/dynamics.hpp"
#include "rydswap/target.hpp"
#include "rydswap/waveform.hpp"

namespace rydswap {

/// Result of one gate evaluation.
struct GateOutcome {
    Matrix4c actual_map = Matrix4c::Zero(); // columns: final amplitudes per initial |00>..|11>
    GateKind target = GateKind::standard_swap;
    double fidelity = 0.0;
    double gate_error = 1.0;
    double leakage = 0.0;
    /// Mean over the four computational initial states of int P_rydberg dt (us).
    double integrated_rydberg_population = 0.0;
};

/// 4x4 map from the singlet amplitude `s` (final C_1- from initial C_1-) and
/// the triplet block (columns: final C_0, C_1+, C_2 for initial C_0, C_1+,
/// C_2), using |01> = (C_1+ + C_1-)/sqrt2 and |10> = (C_1+ - C_1-)/sqrt2.
Matrix4c assemble_gate_matrix(std::complex<double> singlet_final,
                              const Eigen::Matrix3cd& triplet_final);

/// Average gate fidelity [Tr(M M^dag) + |Tr M|^2] / 20 with M = target^dag actual.
/// Invariant under a global phase of `actual`; leakage shows up through a
/// non-unitary M.
double fidelity(const Matrix4c& actual, const TargetGate& target);

/// One singlet and one triplet propagation (three triplet initial states in
/// lock-step), assembled and scored against `target`.
GateOutcome evaluate_gate(const WaveformSet& ws, const BlockadeModel& bm, const TargetGate& target,
                          const EvolutionOptions& opts = {});

/// Scores the evolved map against both SWAP formats and keeps the better one.
GateOutcome evaluate_gate_auto(const WaveformSet& ws, const BlockadeModel& bm,
                               const EvolutionOptions& opts = {});

/// The 4x4 map obtained by propagating |00>..|11> through the product-basis
/// model directly. Independent of the singlet/triplet split.
Matrix4c full_basis_map(const WaveformSet& ws, const BlockadeModel& bm,
                        const EvolutionOptions& opts = {});

struct DecayEstimate {
    double gamma_r = 0.0;         // 1/us
    double coarse_error = 0.0;    // 0.5 gamma_r tau
    double integrated_error = 0.0; // gamma_r * <int P_ryd dt>
};

/// Throws std::invalid_argument when gamma_r < 0.
DecayEstimate decay_estimate(const GateOutcome& outcome, double gamma_r, double tau);

/// Effective single-photon drive obtained by adiabatically eliminating a far
/// detuned intermediate level (second-order formulas):
///   Omega_eff = Omega_a Omega_b / (2 Delta_e)
///   shift_a = Omega_a^2 / (4 Delta_e),  shift_b = Omega_b^2 / (4 Delta_e)
/// Products of Fourier series are formed exactly, so the outputs are again
/// Fourier series (of order N_a + N_b, 2 N_a, 2 N_b).
struct TwoPhotonReduction {
    FourierSeries omega_eff;
    FourierSeries shift_a;
    FourierSeries shift_b;
    double delta_e = 0.0;          // rad/us
    double separation_ratio = 0.0; // |Delta_e| / peak(|Omega_a|, |Omega_b|)
    bool weakly_separated = false; // separation_ratio < 10: approximation is poor
};

class SingularEliminationError : public std::invalid_argument {
public:
    SingularEliminationError() : std::invalid_argument("two_photon: Delta_e must be non-zero") {}
};

/// Throws SingularEliminationError when delta_e is zero or not finite.
TwoPhotonReduction two_photon_reduce(const FourierSeries& omega_a, const FourierSeries& omega_b,
                                     double delta_e, double tau = kDefaultTau);

struct TwoPhotonLegs {
    FourierSeries omega_a;
    FourierSeries omega_b; // constant
};

/// Inverse map: holds the b leg constant at `omega_b` (rad/us) and returns
/// Omega_a = 2 Delta_e Omega_eff / Omega_b.
TwoPhotonLegs two_photon_split(const FourierSeries& omega_eff, double omega_b, double delta_e);

} // namespace rydswap
