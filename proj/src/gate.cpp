#include "rydswap/gate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rydswap {

namespace {

// Columns: C_0, C_1+, C_2, C_1- over |00>, |01>, |10>, |11>.
Matrix4c symmetric_basis() {
    const double s = 1.0 / std::sqrt(2.0);
    Matrix4c v = Matrix4c::Zero();
    v(0, 0) = 1.0;
    v(1, 1) = s;
    v(2, 1) = s;
    v(3, 2) = 1.0;
    v(1, 3) = s;
    v(2, 3) = -s;
    return v;
}

} // namespace

Matrix4c assemble_gate_matrix(std::complex<double> singlet_final,
                              const Eigen::Matrix3cd& triplet_final) {
    Matrix4c block = Matrix4c::Zero();
    block.topLeftCorner<3, 3>() = triplet_final;
    block(3, 3) = singlet_final;
    const Matrix4c v = symmetric_basis();
    return v * block * v.adjoint();
}

double fidelity(const Matrix4c& actual, const TargetGate& target) {
    const Matrix4c m = target.matrix.adjoint() * actual;
    const double tr_mm = (m * m.adjoint()).trace().real();
    const double tr2 = std::norm(m.trace());
    return (tr_mm + tr2) / 20.0;
}

GateOutcome evaluate_gate(const WaveformSet& ws, const BlockadeModel& bm, const TargetGate& target,
                          const EvolutionOptions& opts) {
    const Eigen::MatrixXcd singlet_init = Eigen::MatrixXcd::Identity(basis::kSingletDim, 1);
    const Eigen::MatrixXcd triplet_init = Eigen::MatrixXcd::Identity(basis::triplet_dim(bm), 3);

    const Propagation singlet = propagate(Channel::singlet, ws, bm, singlet_init, opts);
    const Propagation triplet = propagate(Channel::triplet, ws, bm, triplet_init, opts);

    GateOutcome out;
    out.target = target.kind;
    out.actual_map = assemble_gate_matrix(singlet.final_states(basis::s_1m, 0),
                                          triplet.final_states.topRows(3));
    out.fidelity = std::clamp(fidelity(out.actual_map, target), 0.0, 1.0);
    out.gate_error = 1.0 - out.fidelity;
    out.leakage = 1.0 - out.actual_map.squaredNorm() / 4.0;
    out.integrated_rydberg_population =
        (triplet.rydberg_time.sum() + singlet.rydberg_time[0]) / 4.0;
    return out;
}

GateOutcome evaluate_gate_auto(const WaveformSet& ws, const BlockadeModel& bm,
                               const EvolutionOptions& opts) {
    GateOutcome out = evaluate_gate(ws, bm, TargetGate::standard_swap(), opts);
    const double f_opposite = fidelity(out.actual_map, TargetGate::opposite_swap());
    if (f_opposite > out.fidelity) {
        out.target = GateKind::opposite_swap;
        out.fidelity = std::clamp(f_opposite, 0.0, 1.0);
        out.gate_error = 1.0 - out.fidelity;
    }
    return out;
}

Matrix4c full_basis_map(const WaveformSet& ws, const BlockadeModel& bm,
                        const EvolutionOptions& opts) {
    const Eigen::MatrixXcd init = Eigen::MatrixXcd::Identity(basis::full_dim(bm), 4);
    const Propagation p = propagate(Channel::full, ws, bm, init, opts);
    return p.final_states.topRows(4);
}

DecayEstimate decay_estimate(const GateOutcome& outcome, double gamma_r, double tau) {
    if (!(gamma_r >= 0.0) || !std::isfinite(gamma_r)) {
        throw std::invalid_argument("decay_estimate: gamma_r must be >= 0");
    }
    DecayEstimate d;
    d.gamma_r = gamma_r;
    d.coarse_error = 0.5 * gamma_r * tau;
    d.integrated_error = gamma_r * outcome.integrated_rydberg_population;
    return d;
}

namespace {

// Coefficients of f * g / divisor as a Fourier series of order Nf + Ng.
FourierSeries product_series(const FourierSeries& f, const FourierSeries& g, double divisor) {
    const int nf = static_cast<int>(f.order());
    const int ng = static_cast<int>(g.order());
    const int n = nf + ng;
    auto coeff = [](const FourierSeries& s, int k) {
        const cplx c = s.coeffs()[static_cast<std::size_t>(std::abs(k))];
        return k < 0 ? std::conj(c) : c;
    };
    // f g = (2pi)^2 / ((2Nf+1)(2Ng+1)) sum_k c_k z^k; rescale to the 2pi/(2N+1)
    // normalisation of the result.
    const double scale = kTwoPi * static_cast<double>(2 * n + 1) /
                         (static_cast<double>(2 * nf + 1) * static_cast<double>(2 * ng + 1) * divisor);
    std::vector<cplx> out(static_cast<std::size_t>(n + 1));
    for (int k = 0; k <= n; ++k) {
        cplx acc{};
        for (int i = std::max(-nf, k - ng); i <= std::min(nf, k + ng); ++i) {
            acc += coeff(f, i) * coeff(g, k - i);
        }
        out[static_cast<std::size_t>(k)] = scale * acc;
    }
    out[0] = {out[0].real(), 0.0};
    return FourierSeries(std::move(out));
}

double peak_magnitude(const FourierSeries& s, double tau) {
    constexpr int kGrid = 2001;
    double peak = 0.0;
    for (int i = 0; i < kGrid; ++i) {
        peak = std::max(peak, std::abs(s.eval(tau * i / (kGrid - 1.0), tau)));
    }
    return peak;
}

void require_nonsingular(double delta_e) {
    if (delta_e == 0.0 || !std::isfinite(delta_e)) {
        throw SingularEliminationError();
    }
}

} // namespace

TwoPhotonReduction two_photon_reduce(const FourierSeries& omega_a, const FourierSeries& omega_b,
                                     double delta_e, double tau) {
    require_nonsingular(delta_e);
    TwoPhotonReduction r;
    r.delta_e = delta_e;
    r.omega_eff = product_series(omega_a, omega_b, 2.0 * delta_e);
    r.shift_a = product_series(omega_a, omega_a, 4.0 * delta_e);
    r.shift_b = product_series(omega_b, omega_b, 4.0 * delta_e);
    const double peak = std::max(peak_magnitude(omega_a, tau), peak_magnitude(omega_b, tau));
    r.separation_ratio =
        peak > 0.0 ? std::abs(delta_e) / peak : std::numeric_limits<double>::infinity();
    r.weakly_separated = r.separation_ratio < 10.0;
    return r;
}

TwoPhotonLegs two_photon_split(const FourierSeries& omega_eff, double omega_b, double delta_e) {
    require_nonsingular(delta_e);
    if (omega_b == 0.0 || !std::isfinite(omega_b)) {
        throw std::invalid_argument("two_photon_split: omega_b must be non-zero");
    }
    return {omega_eff.scaled(2.0 * delta_e / omega_b),
            FourierSeries::constant_mhz(angular_to_mhz(omega_b))};
}

} // namespace rydswap
