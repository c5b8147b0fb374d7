#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "rydswap/gate.hpp"
#include "rydswap/presets.hpp"
#include "support.hpp"

using namespace rydswap;

namespace {

Matrix4c haar_unitary(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix4c z;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            z(r, c) = {n(rng), n(rng)};
        }
    }
    Eigen::HouseholderQR<Matrix4c> qr(z);
    Matrix4c q = qr.householderQ();
    const Matrix4c rr = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < 4; ++k) {
        q.col(k) *= rr(k, k) / std::abs(rr(k, k));
    }
    return q;
}

// Hand-written reference: F = (Tr(M M^dag) + |Tr M|^2) / 20, M = T^dag A.
double fidelity_oracle(const Matrix4c& a, const Matrix4c& t) {
    double tr_mm = 0.0;
    cplx tr{};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            cplx m{};
            for (int k = 0; k < 4; ++k) {
                m += std::conj(t(k, i)) * a(k, j);
            }
            tr_mm += std::norm(m);
            if (i == j) {
                tr += m;
            }
        }
    }
    return (tr_mm + std::norm(tr)) / 20.0;
}

} // namespace

TEST_CASE("target gates") {
    const Matrix4c s = TargetGate::standard_swap().matrix;
    CHECK(s(1, 2) == cplx{1.0});
    CHECK(s(2, 1) == cplx{1.0});
    CHECK(s(0, 0) == cplx{1.0});
    CHECK(s(3, 3) == cplx{1.0});
    const Matrix4c o = TargetGate::opposite_swap().matrix;
    CHECK(o(0, 3) == cplx{1.0});
    CHECK(o(3, 0) == cplx{1.0});
    CHECK(o(1, 1) == cplx{1.0});
    CHECK(o(2, 2) == cplx{1.0});
    CHECK_THROWS_AS(TargetGate::custom(Matrix4c::Zero()), std::invalid_argument);
    CHECK(TargetGate::custom(s).kind == GateKind::custom);
    CHECK(parse_gate_kind("opposite") == GateKind::opposite_swap);
    CHECK(to_string(GateKind::standard_swap) == "standard");
}

TEST_CASE("assembly from singlet and triplet blocks") {
    const Eigen::Matrix3cd id = Eigen::Matrix3cd::Identity();
    CHECK((assemble_gate_matrix(-1.0, id) - TargetGate::standard_swap().matrix).norm() < 1e-15);
    CHECK((assemble_gate_matrix(1.0, id) - Matrix4c::Identity()).norm() < 1e-15);

    Eigen::Matrix3cd anti = Eigen::Matrix3cd::Zero();
    anti(0, 2) = 1.0;
    anti(2, 0) = 1.0;
    anti(1, 1) = 1.0;
    CHECK((assemble_gate_matrix(1.0, anti) - TargetGate::opposite_swap().matrix).norm() < 1e-15);

    // (|01>, |10>) sub-block is (1/2)[[T+ + s, T+ - s], [T+ - s, T+ + s]].
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n;
    Eigen::Matrix3cd t;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            t(r, c) = {n(rng), n(rng)};
        }
    }
    const cplx s{n(rng), n(rng)};
    const Matrix4c m = assemble_gate_matrix(s, t);
    const cplx tp = t(1, 1);
    CHECK(std::abs(m(1, 1) - 0.5 * (tp + s)) < 1e-14);
    CHECK(std::abs(m(1, 2) - 0.5 * (tp - s)) < 1e-14);
    CHECK(std::abs(m(2, 1) - 0.5 * (tp - s)) < 1e-14);
    CHECK(std::abs(m(2, 2) - 0.5 * (tp + s)) < 1e-14);
    const double r2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(m(0, 1) - r2 * t(0, 1)) < 1e-14);
    CHECK(std::abs(m(3, 0) - t(2, 0)) < 1e-14);
}

TEST_CASE("fidelity contract") {
    const TargetGate swap = TargetGate::standard_swap();
    CHECK(fidelity(swap.matrix, swap) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fidelity(Matrix4c::Zero(), swap) == 0.0);
    Matrix4c cz = Matrix4c::Identity();
    cz(3, 3) = -1.0;
    CHECK(fidelity(cz, swap) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(fidelity(Matrix4c::Identity(), swap) == doctest::Approx(0.4).epsilon(1e-15));

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> phase(-kPi, kPi);
    for (int k = 0; k < 200; ++k) {
        const Matrix4c a = haar_unitary(rng);
        const Matrix4c shrunk = 0.9 * a; // non-unitary, leaky
        const double f = fidelity(a, swap);
        const cplx g = std::polar(1.0, phase(rng));
        CHECK(std::abs(fidelity(g * a, swap) - f) < 1e-12);
        CHECK(std::abs(fidelity(g * shrunk, swap) - fidelity(shrunk, swap)) < 1e-12);
        CHECK(std::abs(f - fidelity_oracle(a, swap.matrix)) < 1e-12);
    }
}

TEST_CASE("unitary maps reach F = 1 only up to a global phase") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> phase(-kPi, kPi);
    for (int k = 0; k < 50; ++k) {
        const TargetGate t = TargetGate::custom(haar_unitary(rng));
        const Matrix4c same = std::polar(1.0, phase(rng)) * t.matrix;
        CHECK(fidelity(same, t) == doctest::Approx(1.0).epsilon(1e-12));
        // Near target: a small random unitary perturbation drops F below 1.
        Matrix4c h = Matrix4c::Zero();
        std::normal_distribution<double> n;
        for (int r = 0; r < 4; ++r) {
            for (int c = r; c < 4; ++c) {
                h(r, c) = r == c ? cplx{n(rng), 0.0} : cplx{n(rng), n(rng)};
                h(c, r) = std::conj(h(r, c));
            }
        }
        const Eigen::SelfAdjointEigenSolver<Matrix4c> es(h);
        const Eigen::Vector4cd ph = (cplx{0.0, 1e-3} * es.eigenvalues().cast<cplx>()).array().exp();
        const Matrix4c near = t.matrix * es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
        const bool scalar_like = (es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff()) < 1e-9;
        if (!scalar_like) {
            CHECK(fidelity(near, t) < 1.0 - 1e-12);
        }
        CHECK(fidelity(haar_unitary(rng), t) < 0.999);
    }
}

TEST_CASE("published presets reproduce their gate errors") {
    for (PresetId id : kAllPresets) {
        CAPTURE(to_string(id));
        const Preset p = preset_lookup(id);
        const auto t0 = std::chrono::steady_clock::now();
        const GateOutcome g = evaluate_gate(p.waveforms, p.blockade, TargetGate::from_kind(p.target));
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        CHECK(g.gate_error < 5e-4);
        CHECK(secs < 5.0);
        CHECK(g.fidelity >= 0.0);
        CHECK(g.fidelity <= 1.0);
        for (int c = 0; c < 4; ++c) {
            CHECK(g.actual_map.col(c).squaredNorm() <= 1.0 + 1e-9);
        }
        // Leakage consistency with the fidelity's Tr(M M^dag) term.
        const Matrix4c m = TargetGate::from_kind(p.target).matrix.adjoint() * g.actual_map;
        const double leak = 1.0 - (m * m.adjoint()).trace().real() / 4.0;
        CHECK(leak >= -1e-12);
        CHECK(std::abs(leak - g.leakage) < 1e-9);
    }
}

TEST_CASE("resolved targets of the appendix presets") {
    for (PresetId id : {PresetId::figA2_resonant, PresetId::figA3_symmetric_B100}) {
        const Preset p = preset_lookup(id);
        const GateOutcome g = evaluate_gate_auto(p.waveforms, p.blockade);
        CHECK(g.target == p.target);
        const GateKind other =
            p.target == GateKind::standard_swap ? GateKind::opposite_swap : GateKind::standard_swap;
        CHECK(fidelity(g.actual_map, TargetGate::from_kind(other)) < 0.5);
    }
}

TEST_CASE("undriven gate is the identity") {
    const GateOutcome g = evaluate_gate(WaveformSet{}, BlockadeModel::ideal(), TargetGate::standard_swap());
    CHECK((g.actual_map - Matrix4c::Identity()).norm() < 1e-14);
    CHECK(g.gate_error == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(g.leakage == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(g.integrated_rydberg_population == 0.0);
}

TEST_CASE("assembled map agrees with the product-basis oracle") {
    EvolutionOptions o;
    o.phase = PhaseConvention::integrated;
    for (PresetId id : kAllPresets) {
        CAPTURE(to_string(id));
        const Preset p = preset_lookup(id);
        const GateOutcome g = evaluate_gate(p.waveforms, p.blockade, TargetGate::from_kind(p.target), o);
        const Matrix4c full = full_basis_map(p.waveforms, p.blockade, o);
        CHECK((g.actual_map - full).cwiseAbs().maxCoeff() < 1e-8);
    }
    for (std::uint64_t seed = 100; seed < 106; ++seed) {
        const WaveformSet ws = testsupport::random_waveforms(seed);
        for (const BlockadeModel& bm : {BlockadeModel::ideal(), BlockadeModel::finite_mhz(60.0, 5.0)}) {
            const GateOutcome g = evaluate_gate(ws, bm, TargetGate::standard_swap(), o);
            const Matrix4c full = full_basis_map(ws, bm, o);
            CHECK((g.actual_map - full).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("halving tolerances barely moves the gate error") {
    for (PresetId id : kAllPresets) {
        const Preset p = preset_lookup(id);
        EvolutionOptions fine;
        fine.integrator = fine.integrator.refined(2.0);
        const double a = evaluate_gate(p.waveforms, p.blockade, TargetGate::from_kind(p.target)).gate_error;
        const double b = evaluate_gate(p.waveforms, p.blockade, TargetGate::from_kind(p.target), fine).gate_error;
        CHECK(std::abs(a - b) < 1e-7);
    }
}

TEST_CASE("large finite blockade approaches the ideal limit") {
    for (PresetId id : kAllPresets) {
        const Preset p = preset_lookup(id);
        const TargetGate t = TargetGate::from_kind(p.target);
        const GateOutcome ideal = evaluate_gate(p.waveforms, BlockadeModel::ideal(), t);
        const GateOutcome big = evaluate_gate(p.waveforms, BlockadeModel::finite_mhz(1e4), t);
        CHECK(std::abs(ideal.gate_error - big.gate_error) < 1e-4);
        CHECK((ideal.actual_map - big.actual_map).cwiseAbs().maxCoeff() < 1e-4);
    }
}

TEST_CASE("decay estimate") {
    const Preset p = preset_lookup(PresetId::fig2_hybrid);
    const GateOutcome g = evaluate_gate(p.waveforms, p.blockade, TargetGate::standard_swap());
    const DecayEstimate zero = decay_estimate(g, 0.0, 0.25);
    CHECK(zero.coarse_error == 0.0);
    CHECK(zero.integrated_error == 0.0);
    const double gamma = 1.0 / 540.0;
    const DecayEstimate d = decay_estimate(g, gamma, 0.25);
    CHECK(d.coarse_error == 0.5 * gamma * 0.25);
    CHECK(d.coarse_error == doctest::Approx(2.3148e-4).epsilon(1e-4));
    CHECK(d.integrated_error >= 0.0);
    CHECK(d.integrated_error <= gamma * 0.25);
    CHECK_THROWS_AS(decay_estimate(g, -1.0, 0.25), std::invalid_argument);
}

TEST_CASE("two-photon reduction") {
    const double w = mhz_to_angular(100.0);
    const FourierSeries leg = FourierSeries::constant_mhz(100.0);
    const TwoPhotonReduction r = two_photon_reduce(leg, leg, mhz_to_angular(1e4));
    CHECK(r.omega_eff.eval(0.1, 0.25) == doctest::Approx(mhz_to_angular(0.5)).epsilon(1e-13));
    CHECK(r.shift_a.eval(0.1, 0.25) == doctest::Approx(w * w / (4.0 * mhz_to_angular(1e4))).epsilon(1e-13));
    CHECK_FALSE(r.weakly_separated);
    CHECK(r.separation_ratio == doctest::Approx(100.0).epsilon(1e-12));

    SUBCASE("zero a-leg") {
        const TwoPhotonReduction z = two_photon_reduce(FourierSeries{}, leg, mhz_to_angular(1e4));
        CHECK(z.omega_eff.eval(0.07, 0.25) == 0.0);
        CHECK(z.shift_b.eval(0.07, 0.25) == doctest::Approx(r.shift_b.eval(0.07, 0.25)).epsilon(1e-15));
    }
    SUBCASE("time-dependent legs: products match pointwise") {
        std::mt19937_64 rng(31);
        const FourierSeries a = testsupport::random_series(rng, 6, 50.0, true);
        const FourierSeries b = testsupport::random_series(rng, 4, 50.0, true);
        const double de = mhz_to_angular(3e3);
        const TwoPhotonReduction t = two_photon_reduce(a, b, de);
        CHECK(t.omega_eff.order() == a.order() + b.order());
        for (double s : {0.0, 0.031, 0.12, 0.2}) {
            const double fa = a.eval(s, 0.25);
            const double fb = b.eval(s, 0.25);
            CHECK(t.omega_eff.eval(s, 0.25) == doctest::Approx(fa * fb / (2 * de)).epsilon(1e-12).scale(1e-6));
            CHECK(t.shift_a.eval(s, 0.25) == doctest::Approx(fa * fa / (4 * de)).epsilon(1e-12).scale(1e-6));
            CHECK(t.shift_b.eval(s, 0.25) == doctest::Approx(fb * fb / (4 * de)).epsilon(1e-12).scale(1e-6));
        }
    }
    SUBCASE("inverse then forward round-trips") {
        const FourierSeries eff = preset_lookup(PresetId::fig3_amplitude_offres).waveforms.omega0.scaled(0.01);
        const double de = mhz_to_angular(5e3);
        const TwoPhotonLegs legs = two_photon_split(eff, mhz_to_angular(80.0), de);
        const TwoPhotonReduction back = two_photon_reduce(legs.omega_a, legs.omega_b, de);
        for (double s : {0.0, 0.05, 0.1, 0.17, 0.25}) {
            CHECK(std::abs(back.omega_eff.eval(s, 0.25) - eff.eval(s, 0.25)) < 1e-12);
        }
    }
    SUBCASE("weak separation is flagged") {
        CHECK(two_photon_reduce(leg, leg, mhz_to_angular(500.0)).weakly_separated);
    }
    SUBCASE("singular elimination") {
        CHECK_THROWS_AS(two_photon_reduce(leg, leg, 0.0), SingularEliminationError);
        CHECK_THROWS_AS(two_photon_split(leg, 1.0, 0.0), SingularEliminationError);
        CHECK_THROWS_AS(two_photon_split(leg, 0.0, 1.0), std::invalid_argument);
    }
}
