#pragma once

#include <complex>
#include <span>
#include <vector>

namespace rydswap {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Converts a frequency quoted in MHz to the internal angular unit (rad/us).
inline constexpr double mhz_to_angular(double mhz) { return kTwoPi * mhz; }
inline constexpr double angular_to_mhz(double rad_per_us) { return rad_per_us / kTwoPi; }

inline constexpr double kDefaultTau = 0.25; // us

/// Real waveform defined by Fourier coefficients a_0..a_N (MHz):
///
///   f(t) = 2pi * (a_0 + sum_n a_n e^{2 pi i n t/tau} + c.c.) / (2N+1)
///
/// The 2pi factor is applied here and nowhere else, so every value returned
/// by eval() is an angular frequency in rad/us.
class FourierSeries {
public:
    FourierSeries() : coeffs_{cplx{0.0, 0.0}} {}
    explicit FourierSeries(std::vector<cplx> coeffs);
    FourierSeries(std::initializer_list<cplx> coeffs)
        : FourierSeries(std::vector<cplx>(coeffs)) {}

    static FourierSeries constant_mhz(double a0) { return FourierSeries({cplx{a0, 0.0}}); }

    [[nodiscard]] std::span<const cplx> coeffs() const { return coeffs_; }
    [[nodiscard]] std::size_t n_terms() const { return coeffs_.size(); }
    [[nodiscard]] std::size_t order() const { return coeffs_.size() - 1; }
    [[nodiscard]] bool is_constant() const;

    /// Value in rad/us.
    [[nodiscard]] double eval(double t, double tau) const;
    /// Time derivative in rad/us^2.
    [[nodiscard]] double derivative(double t, double tau) const;
    /// Antiderivative from 0 to t, in rad.
    [[nodiscard]] double integral(double t, double tau) const;
    /// Full complex evaluation of the series expression; the imaginary part is
    /// zero up to rounding and is exposed for realness checks.
    [[nodiscard]] cplx eval_complex(double t, double tau) const;
    /// eval() given the precomputed phasor e^{2 pi i t / tau}.
    [[nodiscard]] double eval_at_phasor(cplx z) const;

    /// Multiplies every coefficient (and therefore f(t)) by `factor`.
    [[nodiscard]] FourierSeries scaled(double factor) const;
    /// Adds a constant angular offset (rad/us) to f(t).
    [[nodiscard]] FourierSeries shifted(double offset_rad_per_us) const;

    friend bool operator==(const FourierSeries&, const FourierSeries&) = default;

private:
    std::vector<cplx> coeffs_;
};

double fourier_eval(const FourierSeries& series, double t, double tau);
double fourier_derivative(const FourierSeries& series, double t, double tau);

/// The complete pulse program: two Rabi frequencies, two detunings
/// (omega_transition - omega_laser) and the gate duration in us.
struct WaveformSet {
    FourierSeries omega0;
    FourierSeries omega1;
    FourierSeries delta0;
    FourierSeries delta1;
    double tau = kDefaultTau;

    /// Throws std::invalid_argument when tau is not strictly positive.
    void validate() const;

    friend bool operator==(const WaveformSet&, const WaveformSet&) = default;
};

/// Instantaneous drive values at one time, all in rad/us.
struct DriveSample {
    double omega0;
    double omega1;
    double delta0;
    double delta1;
};

DriveSample sample(const WaveformSet& ws, double t);

struct BoundaryResiduals {
    double value_start = 0.0; // |f(0)| / peak |f|
    double value_end = 0.0;   // |f(tau)| / peak |f|
    double slope_start = 0.0; // |f'(0)| / peak |f'|
    double slope_end = 0.0;   // |f'(tau)| / peak |f'|
    double peak_value = 0.0;  // rad/us
    double peak_slope = 0.0;  // rad/us^2

    [[nodiscard]] double worst() const;
};

struct BoundaryReport {
    bool passes = false;
    double tol_frac = 1e-3;
    BoundaryResiduals omega0;
    BoundaryResiduals omega1;
};

/// Residuals of one series relative to its peak magnitude and peak slope,
/// with peaks taken over a dense grid of `grid_points` samples in [0, tau].
BoundaryResiduals boundary_residuals(const FourierSeries& series, double tau,
                                     int grid_points = 4001);

/// Checks that both Rabi waveforms start and end at zero with zero slope.
/// Detunings are not checked. Failing waveforms are reported, never rejected.
BoundaryReport boundary_check(const WaveformSet& ws, double tol_frac = 1e-3);

} // namespace rydswap
