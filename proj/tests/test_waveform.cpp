#include <doctest.h>

#include <cmath>
#include <random>

#include "rydswap/presets.hpp"
#include "rydswap/waveform.hpp"
#include "support.hpp"

using namespace rydswap;
using testsupport::fourier_oracle;

namespace {

const std::vector<cplx> kFig2Omega{{66.26, 0}, {-20.40, 0}, {-4.41, 0},
                                   {-12.61, 0}, {-1.47, 0}, {5.76, 0}};

} // namespace

TEST_CASE("constant series evaluates to 2pi a0") {
    const FourierSeries s = FourierSeries::constant_mhz(10.0);
    for (double t : {0.0, 0.03, 0.25, 1.7}) {
        CHECK(fourier_eval(s, t, 0.25) == doctest::Approx(2.0 * kPi * 10.0).epsilon(1e-15));
        CHECK(fourier_derivative(s, t, 0.25) == 0.0);
    }
}

TEST_CASE("fig2 Rabi waveform starts at zero") {
    const FourierSeries s(kFig2Omega);
    // 66.26 - 2 * 33.13 = 0 up to rounding of the decimal literals.
    CHECK(std::abs(s.eval(0.0, 0.25)) < 1e-12);
    CHECK(std::abs(s.eval(0.25, 0.25)) < 1e-12);
}

TEST_CASE("evaluation matches an independent cos/sin oracle on a dense grid") {
    const FourierSeries s(kFig2Omega);
    double peak = 0.0;
    double peak_oracle = 0.0;
    const int n = 10000;
    for (int i = 0; i <= n; ++i) {
        const double t = 0.25 * i / n;
        const double v = s.eval(t, 0.25);
        const double o = fourier_oracle(kFig2Omega, t, 0.25);
        CHECK(v == doctest::Approx(o).epsilon(1e-12).scale(1.0));
        peak = std::max(peak, std::abs(v));
        peak_oracle = std::max(peak_oracle, std::abs(o));
    }
    CHECK(std::abs(peak - peak_oracle) <= 1e-9 * peak_oracle);

    const Preset p = preset_lookup(PresetId::fig2_hybrid);
    const auto d0 = testsupport::coeffs_of(p.waveforms.delta0);
    for (double t : {0.0, 0.01, 0.1, 0.125, 0.2}) {
        CHECK(p.waveforms.delta0.eval(t, 0.25) ==
              doctest::Approx(fourier_oracle(d0, t, 0.25)).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("evaluation is real for random series and times") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ut(-3.0, 3.0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const FourierSeries s = testsupport::random_series(rng, 1 + k % 12, 100.0, true);
        for (int i = 0; i < 1000; ++i) {
            const cplx v = s.eval_complex(ut(rng), 0.25);
            worst = std::max(worst, std::abs(v.imag()) / std::max(1.0, std::abs(v.real())));
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("evaluation is periodic in tau") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ut(0.0, 0.25);
    for (int k = 0; k < 200; ++k) {
        const FourierSeries s = testsupport::random_series(rng, 8, 50.0, true);
        const double t = ut(rng);
        const double a = s.eval(t, 0.25);
        CHECK(s.eval(t + 0.25, 0.25) == doctest::Approx(a).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("analytic derivative matches a central finite difference") {
    const double h = 1e-6;
    auto fd = [&](const FourierSeries& s, double t) {
        return (s.eval(t + h, 0.25) - s.eval(t - h, 0.25)) / (2.0 * h);
    };
    const Preset p = preset_lookup(PresetId::fig2_hybrid);
    const double d = fourier_derivative(p.waveforms.delta0, 0.1, 0.25);
    CHECK(std::abs(d - fd(p.waveforms.delta0, 0.1)) <= 1e-4 * std::abs(d));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ut(0.0, 0.25);
    for (int k = 0; k < 100; ++k) {
        const FourierSeries s = testsupport::random_series(rng, 6, 30.0, true);
        const double t = ut(rng);
        const double ds = s.derivative(t, 0.25);
        CHECK(std::abs(ds - fd(s, t)) <= 1e-4 * std::max(std::abs(ds), 1.0));
    }
}

TEST_CASE("real-coefficient series have zero slope at t = 0") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 20; ++k) {
        const FourierSeries s = testsupport::random_series(rng, 9, 80.0, false);
        CHECK(s.derivative(0.0, 0.25) == 0.0);
    }
}

TEST_CASE("antiderivative matches composite Simpson quadrature") {
    std::mt19937_64 rng(9);
    for (int k = 0; k < 10; ++k) {
        const FourierSeries s = testsupport::random_series(rng, 6, 30.0, true);
        const double t_end = 0.05 + 0.02 * k;
        const int n = 2000;
        const double h = t_end / n;
        double acc = s.eval(0.0, 0.25) + s.eval(t_end, 0.25);
        for (int i = 1; i < n; ++i) {
            acc += (i % 2 ? 4.0 : 2.0) * s.eval(i * h, 0.25);
        }
        CHECK(s.integral(t_end, 0.25) == doctest::Approx(acc * h / 3.0).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("scaled and shifted transform the waveform") {
    const FourierSeries s(kFig2Omega);
    CHECK(s.scaled(0.5).eval(0.1, 0.25) == doctest::Approx(0.5 * s.eval(0.1, 0.25)).epsilon(1e-14));
    const double off = mhz_to_angular(1.5);
    CHECK(s.shifted(off).eval(0.1, 0.25) ==
          doctest::Approx(s.eval(0.1, 0.25) + off).epsilon(1e-13));
    CHECK(s.scaled(1.0) == s);
    CHECK(s.shifted(0.0) == s);
}

TEST_CASE("invalid series and durations are rejected") {
    CHECK_THROWS_AS(FourierSeries({cplx{1.0, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(FourierSeries(std::vector<cplx>{}), std::invalid_argument);
    CHECK_THROWS_AS(FourierSeries({cplx{NAN, 0.0}}), std::invalid_argument);
    const FourierSeries s = FourierSeries::constant_mhz(1.0);
    CHECK_THROWS_AS((void)fourier_eval(s, 0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)fourier_derivative(s, 0.1, -1.0), std::invalid_argument);
    WaveformSet ws;
    ws.tau = 0.0;
    CHECK_THROWS_AS(ws.validate(), std::invalid_argument);
}

TEST_CASE("sample evaluates all four drives at one time") {
    const Preset p = preset_lookup(PresetId::fig2_hybrid);
    const DriveSample d = sample(p.waveforms, 0.13);
    CHECK(d.omega0 == doctest::Approx(p.waveforms.omega0.eval(0.13, 0.25)).epsilon(1e-14));
    CHECK(d.delta0 == doctest::Approx(p.waveforms.delta0.eval(0.13, 0.25)).epsilon(1e-14));
    CHECK(d.delta1 == doctest::Approx(p.waveforms.delta1.eval(0.13, 0.25)).epsilon(1e-14));
}

TEST_CASE("boundary check") {
    SUBCASE("every preset passes at 1e-3") {
        for (PresetId id : kAllPresets) {
            CAPTURE(to_string(id));
            const BoundaryReport r = boundary_check(preset_lookup(id).waveforms, 1e-3);
            CHECK(r.passes);
            CHECK(r.omega0.worst() <= 1e-3);
            CHECK(r.omega1.worst() <= 1e-3);
        }
    }
    SUBCASE("fig3 start residual is the rounding of its a0") {
        const BoundaryResiduals r =
            boundary_residuals(preset_lookup(PresetId::fig3_amplitude_offres).waveforms.omega0, 0.25);
        // sum residual -0.01 MHz against the series peak
        CHECK(r.value_start > 0.0);
        CHECK(r.value_start < 1e-3);
    }
    SUBCASE("a nonzero constant drive fails") {
        WaveformSet ws;
        ws.omega0 = FourierSeries::constant_mhz(1.0);
        ws.omega1 = FourierSeries::constant_mhz(1.0);
        CHECK_FALSE(boundary_check(ws).passes);
    }
    SUBCASE("detunings are exempt") {
        WaveformSet ws = preset_lookup(PresetId::fig3_amplitude_offres).waveforms;
        ws.delta0 = FourierSeries::constant_mhz(500.0);
        CHECK(boundary_check(ws).passes);
    }
    SUBCASE("tolerance must be positive") {
        CHECK_THROWS_AS(boundary_check(WaveformSet{}, 0.0), std::invalid_argument);
    }
}
