#include <doctest.h>

#include <cmath>
#include <random>

#include "rydswap/dynamics.hpp"
#include "rydswap/gate.hpp"
#include "rydswap/presets.hpp"
#include "support.hpp"

using namespace rydswap;
using namespace rydswap::basis;
using testsupport::fourier_oracle;

namespace {

WaveformSet zero_drive() { return WaveformSet{}; }

WaveformSet constant_drive(double omega0_mhz, double omega1_mhz, double d0_mhz, double d1_mhz) {
    WaveformSet ws;
    ws.omega0 = FourierSeries::constant_mhz(omega0_mhz);
    ws.omega1 = FourierSeries::constant_mhz(omega1_mhz);
    ws.delta0 = FourierSeries::constant_mhz(d0_mhz);
    ws.delta1 = FourierSeries::constant_mhz(d1_mhz);
    return ws;
}

StateVector unit(int dim, int k) {
    StateVector v = StateVector::Zero(dim);
    v[k] = 1.0;
    return v;
}

} // namespace

TEST_CASE("singlet Hamiltonian") {
    CHECK(h_singlet(zero_drive(), 0.1).isZero(0.0));

    const Preset p = preset_lookup(PresetId::fig2_hybrid);
    const double t = 0.125;
    const HamMatrix h = h_singlet(p.waveforms, t);
    const double w0 = fourier_oracle(testsupport::coeffs_of(p.waveforms.omega0), t, 0.25);
    const double d0 = fourier_oracle(testsupport::coeffs_of(p.waveforms.delta0), t, 0.25);
    const double d1 = fourier_oracle(testsupport::coeffs_of(p.waveforms.delta1), t, 0.25);
    CHECK(h(0, 1).real() == doctest::Approx(0.5 * w0).epsilon(1e-12));
    CHECK(h(0, 2).real() == doctest::Approx(0.5 * w0).epsilon(1e-12));
    CHECK(h(1, 1).real() == doctest::Approx(d0).epsilon(1e-12));
    CHECK(h(2, 2).real() == doctest::Approx(d1).epsilon(1e-12));
    CHECK(h(1, 2) == cplx{});
    CHECK(h(0, 0) == cplx{});
}

TEST_CASE("every Hamiltonian is exactly Hermitian") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const WaveformSet ws = testsupport::random_waveforms(seed);
        for (const BlockadeModel& bm :
             {BlockadeModel::ideal(), BlockadeModel::finite_mhz(120.0, 7.0)}) {
            for (double t : {0.0, 0.037, 0.19}) {
                const double psi = triplet_phase(ws, t, PhaseConvention::integrated);
                const HamMatrix hs = h_singlet(ws, t);
                const HamMatrix ht = h_triplet(ws, bm, t, psi);
                const HamMatrix hp = h_triplet_phase_free(ws, bm, t, 3.0);
                const HamMatrix hf = h_full(ws, bm, t, laser_phases(ws, t, PhaseConvention::integrated));
                CHECK(hs == hs.adjoint());
                CHECK(ht == ht.adjoint());
                CHECK(hp == hp.adjoint());
                CHECK(hf == hf.adjoint());
            }
        }
    }
}

TEST_CASE("triplet Hamiltonian structure") {
    SUBCASE("undriven: diagonal detunings only") {
        const WaveformSet ws = constant_drive(0.0, 0.0, 3.0, -5.0);
        const BlockadeModel bm = BlockadeModel::finite_mhz(0.0, 2.0);
        const HamMatrix h = h_triplet(ws, bm, 0.1, 0.7);
        HamMatrix expected = HamMatrix::Zero(7, 7);
        expected(t_r0, t_r0) = mhz_to_angular(3.0);
        expected(t_r1, t_r1) = mhz_to_angular(-5.0);
        expected(t_rr, t_rr) = mhz_to_angular(-2.0);
        expected(t_qq, t_qq) = mhz_to_angular(0.0);
        CHECK((h - expected).norm() < 1e-12);
    }
    SUBCASE("ideal blockade truncates to five states") {
        CHECK(h_triplet(zero_drive(), BlockadeModel::ideal(), 0.0, 0.0).rows() == 5);
        CHECK(triplet_dim(BlockadeModel::ideal()) == 5);
        CHECK(full_dim(BlockadeModel::ideal()) == 8);
        CHECK(full_dim(BlockadeModel::finite(1.0)) == 10);
    }
    SUBCASE("couplings carry the relative phase") {
        const WaveformSet ws = constant_drive(10.0, 20.0, 0.0, 0.0);
        const double psi = 0.3;
        const HamMatrix h = h_triplet(ws, BlockadeModel::finite_mhz(50.0), 0.0, psi);
        const double w0 = mhz_to_angular(10.0);
        const double w1 = mhz_to_angular(20.0);
        const cplx e = std::polar(1.0, psi);
        CHECK(std::abs(h(t_0, t_r0) - std::sqrt(2.0) * w0 / 2.0) < 1e-12);
        CHECK(std::abs(h(t_1p, t_r0) - w1 / 2.0 * e) < 1e-12);
        CHECK(std::abs(h(t_1p, t_r1) - w0 / 2.0 * std::conj(e)) < 1e-12);
        CHECK(std::abs(h(t_2, t_r1) - std::sqrt(2.0) * w1 / 2.0) < 1e-12);
        CHECK(std::abs(h(t_r0, t_rr) - std::sqrt(2.0) * w0 / 2.0 * std::conj(e)) < 1e-12);
        CHECK(std::abs(h(t_r1, t_rr) - std::sqrt(2.0) * w1 / 2.0 * e) < 1e-12);
        CHECK(std::abs(h(t_rr, t_qq) - mhz_to_angular(50.0)) < 1e-12);
    }
    SUBCASE("B = 0 decouples the pair state") {
        const WaveformSet ws = testsupport::random_waveforms(4);
        const HamMatrix h = h_triplet(ws, BlockadeModel::finite(0.0, 0.0), 0.1, 0.2);
        for (int k = 0; k < 6; ++k) {
            CHECK(h(k, t_qq) == cplx{});
        }
    }
}

TEST_CASE("triplet phase conventions") {
    const WaveformSet c = constant_drive(1.0, 1.0, 4.0, -3.0);
    for (double t : {0.0, 0.1, 0.25}) {
        const double literal = mhz_to_angular(7.0) * t;
        CHECK(triplet_phase(c, t, PhaseConvention::integrated) == doctest::Approx(literal).epsilon(1e-12));
        CHECK(triplet_phase(c, t, PhaseConvention::pointwise) == doctest::Approx(literal).epsilon(1e-12));
    }
    const WaveformSet ws = preset_lookup(PresetId::fig2_hybrid).waveforms;
    const double t = 0.11;
    const double h = 1e-6;
    for (auto conv : {PhaseConvention::pointwise, PhaseConvention::integrated}) {
        const double fd = (triplet_phase(ws, t + h, conv) - triplet_phase(ws, t - h, conv)) / (2 * h);
        const double rate = triplet_phase_rate(ws, t, conv);
        CHECK(std::abs(rate - fd) <= 1e-5 * std::abs(rate));
    }
    const LaserPhases lp = laser_phases(ws, t, PhaseConvention::integrated);
    CHECK(lp.theta0 - lp.theta1 ==
          doctest::Approx(triplet_phase(ws, t, PhaseConvention::integrated)).epsilon(1e-12));
    CHECK(parse_phase_convention("integrated") == PhaseConvention::integrated);
    CHECK_FALSE(parse_phase_convention("nope").has_value());
}

TEST_CASE("symmetry basis block-diagonalises the product Hamiltonian") {
    for (std::uint64_t seed = 10; seed < 16; ++seed) {
        const WaveformSet ws = testsupport::random_waveforms(seed);
        for (const BlockadeModel& bm :
             {BlockadeModel::ideal(), BlockadeModel::finite_mhz(80.0, -4.0)}) {
            const HamMatrix v = symmetry_basis(bm);
            CHECK((v.adjoint() * v - HamMatrix::Identity(v.rows(), v.cols())).norm() < 1e-14);
            const double t = 0.01 * static_cast<double>(seed);
            const HamMatrix hb = v.adjoint() * h_full(ws, bm, t, laser_phases(ws, t, PhaseConvention::integrated)) * v;
            const int ns = kSingletDim;
            const int nt = triplet_dim(bm);
            CHECK(hb.block(0, ns, ns, nt).norm() < 1e-12);
            CHECK(hb.block(ns, 0, nt, ns).norm() < 1e-12);
        }
    }
    CHECK(h_full(zero_drive(), BlockadeModel::ideal(), 0.0, {}).rows() == 8);
}

TEST_CASE("integration basics") {
    SUBCASE("zero Hamiltonian leaves the state unchanged") {
        const StateVector psi0 = StateVector::Constant(3, cplx{1.0 / std::sqrt(3.0), 0.0});
        const Trajectory tr = evolve(Channel::singlet, zero_drive(), BlockadeModel::ideal(), psi0,
                                     {}, uniform_samples(0.0, 0.25, 11));
        REQUIRE(tr.times.size() == 11);
        for (const auto& s : tr.states) {
            CHECK((s - psi0).norm() == 0.0);
        }
    }
    SUBCASE("constant drive: analytic Rabi oscillation") {
        const double w = mhz_to_angular(7.3);
        const WaveformSet ws = constant_drive(7.3, 0.0, 0.0, 0.0);
        const auto times = uniform_samples(0.0, 0.25, 501);
        const Trajectory tr =
            evolve(Channel::singlet, ws, BlockadeModel::ideal(), unit(3, s_1m), {}, times);
        double worst = 0.0;
        for (std::size_t k = 0; k < tr.times.size(); ++k) {
            const double t = tr.times[k];
            worst = std::max(worst, std::abs(tr.states[k][s_1m] - std::cos(w * t / 2.0)));
            worst = std::max(worst, std::abs(tr.states[k][s_ryd0] - cplx{0.0, -std::sin(w * t / 2.0)}));
        }
        CHECK(worst < 1e-9);
    }
    SUBCASE("sample times are honoured and include both ends") {
        const Trajectory tr = evolve(Channel::triplet, preset_lookup(PresetId::fig3_amplitude_offres).waveforms,
                                     BlockadeModel::ideal(), unit(5, t_0), {}, uniform_samples(0.0, 0.25, 7));
        REQUIRE(tr.times.size() == 7);
        CHECK(tr.times.front() == 0.0);
        CHECK(tr.times.back() == 0.25);
    }
    SUBCASE("non-normalised or mis-sized initial states are rejected") {
        CHECK_THROWS_AS(evolve(Channel::singlet, zero_drive(), BlockadeModel::ideal(),
                               StateVector::Zero(3), {}),
                        std::invalid_argument);
        CHECK_THROWS_AS(evolve(Channel::singlet, zero_drive(), BlockadeModel::ideal(), unit(5, 0), {}),
                        std::invalid_argument);
    }
    SUBCASE("step budget exhaustion names the failure time") {
        EvolutionOptions o;
        o.integrator.max_steps = 50;
        try {
            (void)evolve(Channel::triplet, preset_lookup(PresetId::fig2_hybrid).waveforms,
                         BlockadeModel::ideal(), unit(5, t_0), o);
            FAIL("expected IntegrationError");
        } catch (const IntegrationError& e) {
            CHECK(e.time() > 0.0);
            CHECK(e.time() < 0.25);
        }
    }
}

TEST_CASE("norm is conserved at default tolerances") {
    for (PresetId id : kAllPresets) {
        const Preset p = preset_lookup(id);
        const int nt = triplet_dim(p.blockade);
        for (int k = 0; k < 3; ++k) {
            const Trajectory tr = evolve(Channel::triplet, p.waveforms, p.blockade, unit(nt, k), {});
            CHECK(std::abs(tr.final_state().norm() - 1.0) < 1e-9);
        }
        const Trajectory ts = evolve(Channel::singlet, p.waveforms, p.blockade, unit(3, 0), {});
        CHECK(std::abs(ts.final_state().norm() - 1.0) < 1e-9);
    }
}

TEST_CASE("integrator configuration") {
    IntegratorConfig c;
    CHECK_NOTHROW(c.validate());
    c.rel_tol = 1e-14;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.abs_tol = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.method = IntegratorConfig::Method::fixed_rk4;
    c.n_steps = 999;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    const IntegratorConfig r = IntegratorConfig{}.refined(2.0);
    CHECK(r.rel_tol == 0.5e-10);
    CHECK(r.abs_tol == 0.5e-12);
}

TEST_CASE("fixed-step RK4 agrees with the adaptive integrator") {
    const Preset p = preset_lookup(PresetId::fig3_amplitude_offres);
    EvolutionOptions fixed;
    fixed.integrator.method = IntegratorConfig::Method::fixed_rk4;
    fixed.integrator.n_steps = 8000;
    const auto a = evolve(Channel::triplet, p.waveforms, p.blockade, unit(5, t_1p), {});
    const auto b = evolve(Channel::triplet, p.waveforms, p.blockade, unit(5, t_1p), fixed);
    CHECK((a.final_state() - b.final_state()).norm() < 1e-8);
}

TEST_CASE("gauge equivalence of the triplet channel") {
    for (PresetId id : kAllPresets) {
        CAPTURE(to_string(id));
        const Preset p = preset_lookup(id);
        for (auto conv : {PhaseConvention::pointwise, PhaseConvention::integrated}) {
            EvolutionOptions o;
            o.phase = conv;
            const GaugeReport r = gauge_transform_check(p.waveforms, p.blockade, o);
            CHECK(r.agrees);
            CHECK(r.max_deviation < 1e-8);
        }
    }
    // Resonant drives carry no phase at all: both gauges integrate the same matrix.
    const Preset a2 = preset_lookup(PresetId::figA2_resonant);
    CHECK(gauge_transform_check(a2.waveforms, a2.blockade, {}).max_deviation == 0.0);
}

TEST_CASE("decomposed product-basis trajectory") {
    const Preset p = preset_lookup(PresetId::fig2_hybrid);
    const GateOutcome g = evaluate_gate(p.waveforms, p.blockade, TargetGate::standard_swap());
    for (int k = 0; k < 4; ++k) {
        const Trajectory tr = evolve_product(p.waveforms, p.blockade, unit(8, k), {});
        CHECK((tr.final_state().head(4) - g.actual_map.col(k)).norm() < 1e-8);
    }
    // Under the integrated convention it must agree with the brute-force model too.
    EvolutionOptions o;
    o.phase = PhaseConvention::integrated;
    const WaveformSet ws = testsupport::random_waveforms(99);
    const BlockadeModel bm = BlockadeModel::finite_mhz(90.0);
    const StateVector psi0 = unit(10, p_01);
    const auto a = evolve_product(ws, bm, psi0, o);
    const auto b = evolve(Channel::full, ws, bm, psi0, o);
    CHECK((a.final_state() - b.final_state()).cwiseAbs().maxCoeff() < 1e-8);
    const std::vector<double> mid{0.0, 0.07, 0.16};
    const auto am = evolve_product(ws, bm, psi0, o, mid);
    const auto bmid = evolve(Channel::full, ws, bm, psi0, o, mid);
    for (std::size_t k = 0; k < mid.size(); ++k) {
        CHECK((am.states[k] - bmid.states[k]).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("labels") {
    CHECK(singlet_labels().size() == 3);
    CHECK(triplet_labels(BlockadeModel::ideal()).size() == 5);
    CHECK(product_labels(BlockadeModel::finite(1.0)).size() == 10);
    CHECK(product_labels(BlockadeModel::ideal())[p_01] == "01");
    CHECK(product_is_rydberg(p_r1));
    CHECK_FALSE(product_is_rydberg(p_11));
    CHECK(triplet_is_rydberg(t_qq));
    CHECK_FALSE(singlet_is_rydberg(s_1m));
}
