#include "rydswap/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rydswap {

namespace {

// Shared normalisation 2pi / (2N+1) that turns the bracketed coefficient sum
// into rad/us.
double prefactor(std::size_t order) {
    return kTwoPi / static_cast<double>(2 * order + 1);
}

cplx unit_phasor(double t, double tau) {
    const double arg = kTwoPi * t / tau;
    return {std::cos(arg), std::sin(arg)};
}

} // namespace

FourierSeries::FourierSeries(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) {
        throw std::invalid_argument("FourierSeries needs at least the a_0 coefficient");
    }
    if (coeffs_.front().imag() != 0.0) {
        throw std::invalid_argument("FourierSeries: a_0 must be real");
    }
    for (const auto& c : coeffs_) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
            throw std::invalid_argument("FourierSeries: non-finite coefficient");
        }
    }
}

bool FourierSeries::is_constant() const {
    return std::all_of(coeffs_.begin() + 1, coeffs_.end(),
                       [](const cplx& c) { return c == cplx{}; });
}

cplx FourierSeries::eval_complex(double t, double tau) const {
    const cplx z = unit_phasor(t, tau);
    cplx zn{1.0, 0.0};
    cplx acc = coeffs_[0];
    for (std::size_t n = 1; n < coeffs_.size(); ++n) {
        zn *= z;
        const cplx w = coeffs_[n] * zn;
        acc += w + std::conj(w);
    }
    return prefactor(order()) * acc;
}

double FourierSeries::eval(double t, double tau) const {
    return eval_at_phasor(unit_phasor(t, tau));
}

double FourierSeries::eval_at_phasor(cplx z) const {
    cplx zn{1.0, 0.0};
    double acc = coeffs_[0].real();
    for (std::size_t n = 1; n < coeffs_.size(); ++n) {
        zn *= z;
        acc += 2.0 * (coeffs_[n] * zn).real();
    }
    return prefactor(order()) * acc;
}

double FourierSeries::derivative(double t, double tau) const {
    const cplx z = unit_phasor(t, tau);
    const double w = kTwoPi / tau;
    cplx zn{1.0, 0.0};
    double acc = 0.0;
    for (std::size_t n = 1; n < coeffs_.size(); ++n) {
        zn *= z;
        // d/dt Re[a z^n] = Re[i n w a z^n] = -n w Im[a z^n]
        acc -= 2.0 * w * static_cast<double>(n) * (coeffs_[n] * zn).imag();
    }
    return prefactor(order()) * acc;
}

double FourierSeries::integral(double t, double tau) const {
    const cplx z = unit_phasor(t, tau);
    const double w = kTwoPi / tau;
    cplx zn{1.0, 0.0};
    double acc = coeffs_[0].real() * t;
    for (std::size_t n = 1; n < coeffs_.size(); ++n) {
        zn *= z;
        // int_0^t a e^{i n w s} ds = a (e^{i n w t} - 1) / (i n w)
        const cplx term = coeffs_[n] * (zn - 1.0) / cplx{0.0, w * static_cast<double>(n)};
        acc += 2.0 * term.real();
    }
    return prefactor(order()) * acc;
}

FourierSeries FourierSeries::scaled(double factor) const {
    std::vector<cplx> out(coeffs_);
    for (auto& c : out) {
        c *= factor;
    }
    return FourierSeries(std::move(out));
}

FourierSeries FourierSeries::shifted(double offset_rad_per_us) const {
    std::vector<cplx> out(coeffs_);
    out[0] += angular_to_mhz(offset_rad_per_us) * static_cast<double>(2 * order() + 1);
    return FourierSeries(std::move(out));
}

double fourier_eval(const FourierSeries& series, double t, double tau) {
    if (!(tau > 0.0)) {
        throw std::invalid_argument("fourier_eval: tau must be positive");
    }
    return series.eval(t, tau);
}

double fourier_derivative(const FourierSeries& series, double t, double tau) {
    if (!(tau > 0.0)) {
        throw std::invalid_argument("fourier_derivative: tau must be positive");
    }
    return series.derivative(t, tau);
}

void WaveformSet::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw std::invalid_argument("WaveformSet: tau must be positive and finite");
    }
}

DriveSample sample(const WaveformSet& ws, double t) {
    const cplx z = unit_phasor(t, ws.tau);
    return {ws.omega0.eval_at_phasor(z), ws.omega1.eval_at_phasor(z), ws.delta0.eval_at_phasor(z),
            ws.delta1.eval_at_phasor(z)};
}

double BoundaryResiduals::worst() const {
    return std::max({value_start, value_end, slope_start, slope_end});
}

BoundaryResiduals boundary_residuals(const FourierSeries& series, double tau, int grid_points) {
    BoundaryResiduals r;
    for (int i = 0; i < grid_points; ++i) {
        const double t = tau * static_cast<double>(i) / static_cast<double>(grid_points - 1);
        r.peak_value = std::max(r.peak_value, std::abs(series.eval(t, tau)));
        r.peak_slope = std::max(r.peak_slope, std::abs(series.derivative(t, tau)));
    }
    auto frac = [](double v, double peak) {
        if (peak > 0.0) {
            return std::abs(v) / peak;
        }
        return v == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    };
    r.value_start = frac(series.eval(0.0, tau), r.peak_value);
    r.value_end = frac(series.eval(tau, tau), r.peak_value);
    r.slope_start = frac(series.derivative(0.0, tau), r.peak_slope);
    r.slope_end = frac(series.derivative(tau, tau), r.peak_slope);
    return r;
}

BoundaryReport boundary_check(const WaveformSet& ws, double tol_frac) {
    ws.validate();
    if (!(tol_frac > 0.0)) {
        throw std::invalid_argument("boundary_check: tol_frac must be positive");
    }
    BoundaryReport report;
    report.tol_frac = tol_frac;
    report.omega0 = boundary_residuals(ws.omega0, ws.tau);
    report.omega1 = boundary_residuals(ws.omega1, ws.tau);
    report.passes = report.omega0.worst() <= tol_frac && report.omega1.worst() <= tol_frac;
    return report;
}

} // namespace rydswap
