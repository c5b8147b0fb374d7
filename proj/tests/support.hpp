#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "rydswap/waveform.hpp"

namespace testsupport {

using rydswap::cplx;
using rydswap::FourierSeries;
using rydswap::WaveformSet;

// Straight cos/sin evaluation of the waveform formula, written independently
// of FourierSeries::eval.
inline double fourier_oracle(const std::vector<cplx>& a, double t, double tau) {
    const double pi = std::acos(-1.0);
    double acc = a[0].real();
    for (std::size_t n = 1; n < a.size(); ++n) {
        const double arg = 2.0 * pi * static_cast<double>(n) * t / tau;
        acc += 2.0 * (a[n].real() * std::cos(arg) - a[n].imag() * std::sin(arg));
    }
    return 2.0 * pi * acc / static_cast<double>(2 * a.size() - 1);
}

inline std::vector<cplx> coeffs_of(const FourierSeries& s) {
    return {s.coeffs().begin(), s.coeffs().end()};
}

inline FourierSeries random_series(std::mt19937_64& rng, int terms, double scale, bool complex) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<cplx> c(static_cast<std::size_t>(terms));
    c[0] = {u(rng), 0.0};
    for (int n = 1; n < terms; ++n) {
        c[static_cast<std::size_t>(n)] = {u(rng), complex ? u(rng) : 0.0};
    }
    return FourierSeries(c);
}

// Random drive program with time-dependent detunings; amplitudes of the
// order of the published presets.
inline WaveformSet random_waveforms(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    WaveformSet ws;
    ws.omega0 = random_series(rng, 5, 60.0, true);
    ws.omega1 = random_series(rng, 5, 60.0, true);
    ws.delta0 = random_series(rng, 4, 20.0, true);
    ws.delta1 = random_series(rng, 4, 20.0, true);
    return ws;
}

} // namespace testsupport
