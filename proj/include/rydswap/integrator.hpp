#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rydswap {

using StateVector = Eigen::VectorXcd;

struct IntegratorConfig {
    enum class Method { adaptive_rk, fixed_rk4 };

    Method method = Method::adaptive_rk;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    int n_steps = 4000; // fixed_rk4 only
    long max_steps = 2'000'000;

    /// Throws std::invalid_argument when rel_tol < 1e-13, abs_tol <= 0 or
    /// n_steps < 1000.
    void validate() const;

    /// Same method with both tolerances divided by `factor` (or the fixed
    /// step count multiplied by it).
    [[nodiscard]] IntegratorConfig refined(double factor) const;
};

/// Raised when the adaptive step size underflows or the step budget runs out.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double time)
        : std::runtime_error(what + " at t=" + std::to_string(time) + " us"), time_(time) {}
    [[nodiscard]] double time() const { return time_; }

private:
    double time_;
};

struct IntegrationStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evals = 0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<StateVector> states;
    IntegrationStats stats;

    [[nodiscard]] const StateVector& final_state() const { return states.back(); }
};

/// `n` equally spaced times covering [t0, t1], both ends included.
std::vector<double> uniform_samples(double t0, double t1, int n);

namespace detail {

// Dormand-Prince 5(4) tableau with the dense-output coefficients of
// Hairer, Norsett & Wanner (DOPRI5).
struct Dopri5 {
    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                            a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                            a65 = -5103.0 / 18656.0;
    static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                            a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    static constexpr double d1 = -12715105075.0 / 11282082432.0,
                            d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0,
                            d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

inline double error_norm(const StateVector& err, const StateVector& y0, const StateVector& y1,
                         double rtol, double atol) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = std::abs(err[i]) / sc;
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
}

template <class Rhs>
Trajectory integrate_adaptive(Rhs&& rhs, double t0, double t1, const StateVector& y0,
                              const IntegratorConfig& cfg, std::span<const double> samples) {
    using T = Dopri5;
    constexpr double safety = 0.9, fac_min = 0.2, fac_max = 10.0, beta = 0.04;
    const double expo = 0.2 - beta * 0.75;
    const Eigen::Index n = y0.size();

    Trajectory out;
    out.times.reserve(samples.size());
    out.states.reserve(samples.size());
    std::size_t next_sample = 0;

    StateVector y = y0, y1(n), k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n),
                err(n);
    double t = t0;
    rhs(t, y, k1);
    ++out.stats.rhs_evals;

    // Initial step from the size of y and y' (Hairer's heuristic, first stage).
    const double span = t1 - t0;
    double h;
    {
        double dnf = 0.0, dny = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double sk = cfg.abs_tol + cfg.rel_tol * std::abs(y[i]);
            dnf += std::norm(k1[i]) / (sk * sk);
            dny += std::norm(y[i]) / (sk * sk);
        }
        h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 * span : 0.01 * std::sqrt(dny / dnf);
        h = std::min(h, span);
    }

    auto emit_until = [&](double t_end, const StateVector& ya, const StateVector& yb,
                          double ta, double hstep, const StateVector& r3, const StateVector& r4,
                          const StateVector& r5, bool last) {
        while (next_sample < samples.size()) {
            const double ts = samples[next_sample];
            if (last && ts >= t_end) {
                // Land the final sample(s) on the exact end state.
                out.times.push_back(ts);
                out.states.push_back(yb);
            } else if (ts <= t_end) {
                const double theta = (ts - ta) / hstep;
                const double theta1 = 1.0 - theta;
                out.times.push_back(ts);
                out.states.push_back(ya + theta * ((yb - ya) +
                                                   theta1 * (r3 + theta * (r4 + theta1 * r5))));
            } else {
                break;
            }
            ++next_sample;
        }
    };

    while (next_sample < samples.size() && samples[next_sample] <= t0) {
        out.times.push_back(samples[next_sample]);
        out.states.push_back(y0);
        ++next_sample;
    }

    double fac_old = 1e-4;
    bool reject = false;
    long steps = 0;
    StateVector r3(n), r4(n), r5(n);
    while (t < t1) {
        if (++steps > cfg.max_steps) {
            throw IntegrationError("integrator: step budget exhausted", t);
        }
        bool last = false;
        if (t + 1.01 * h >= t1) {
            h = t1 - t;
            last = true;
        }
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
            throw IntegrationError("integrator: step size underflow", t);
        }

        tmp = y + h * T::a21 * k1;
        rhs(t + T::c2 * h, tmp, k2);
        tmp = y + h * (T::a31 * k1 + T::a32 * k2);
        rhs(t + T::c3 * h, tmp, k3);
        tmp = y + h * (T::a41 * k1 + T::a42 * k2 + T::a43 * k3);
        rhs(t + T::c4 * h, tmp, k4);
        tmp = y + h * (T::a51 * k1 + T::a52 * k2 + T::a53 * k3 + T::a54 * k4);
        rhs(t + T::c5 * h, tmp, k5);
        tmp = y + h * (T::a61 * k1 + T::a62 * k2 + T::a63 * k3 + T::a64 * k4 + T::a65 * k5);
        const double t_new = last ? t1 : t + h;
        rhs(t_new, tmp, k6);
        y1 = y + h * (T::a71 * k1 + T::a73 * k3 + T::a74 * k4 + T::a75 * k5 + T::a76 * k6);
        rhs(t_new, y1, k7);
        out.stats.rhs_evals += 6;

        err = h * (T::e1 * k1 + T::e3 * k3 + T::e4 * k4 + T::e5 * k5 + T::e6 * k6 + T::e7 * k7);
        const double e = error_norm(err, y, y1, cfg.rel_tol, cfg.abs_tol);

        const double fac11 = std::pow(std::max(e, 1e-300), expo);
        double fac = fac11 / std::pow(fac_old, beta);
        fac = std::clamp(fac / safety, 1.0 / fac_max, 1.0 / fac_min);
        double h_new = h / fac;

        if (e <= 1.0 && std::isfinite(e)) {
            fac_old = std::max(e, 1e-4);
            ++out.stats.accepted;
            if (next_sample < samples.size()) {
                const StateVector r2 = y1 - y;
                r3 = h * k1 - r2;
                r4 = r2 - h * k7 - r3;
                r5 = h * (T::d1 * k1 + T::d3 * k3 + T::d4 * k4 + T::d5 * k5 + T::d6 * k6 +
                          T::d7 * k7);
                emit_until(t_new, y, y1, t, h, r3, r4, r5, last);
            }
            y.swap(y1);
            k1.swap(k7);
            t = t_new;
            if (std::abs(h_new) > t1 - t) {
                h_new = t1 - t;
            }
            if (reject) {
                h_new = std::min(h_new, h);
            }
            reject = false;
        } else {
            if (!std::isfinite(e)) {
                h_new = 0.1 * h;
            } else {
                h_new = h / std::min(1.0 / fac_min, fac11 / safety);
            }
            reject = true;
            ++out.stats.rejected;
        }
        h = h_new;
    }
    if (out.states.empty() || out.times.back() < t1) {
        out.times.push_back(t1);
        out.states.push_back(y);
    }
    return out;
}

template <class Rhs>
Trajectory integrate_fixed_rk4(Rhs&& rhs, double t0, double t1, const StateVector& y0,
                               const IntegratorConfig& cfg, std::span<const double> samples) {
    const Eigen::Index n = y0.size();
    const int steps = cfg.n_steps;
    const double h = (t1 - t0) / steps;

    Trajectory out;
    std::size_t next_sample = 0;
    StateVector y = y0, k1(n), k2(n), k3(n), k4(n), tmp(n), y_next(n), f_next(n);
    rhs(t0, y, k1);
    ++out.stats.rhs_evals;
    while (next_sample < samples.size() && samples[next_sample] <= t0) {
        out.times.push_back(samples[next_sample]);
        out.states.push_back(y0);
        ++next_sample;
    }
    for (int s = 0; s < steps; ++s) {
        const double t = t0 + s * h;
        const double t_next = (s + 1 == steps) ? t1 : t0 + (s + 1) * h;
        tmp = y + 0.5 * h * k1;
        rhs(t + 0.5 * h, tmp, k2);
        tmp = y + 0.5 * h * k2;
        rhs(t + 0.5 * h, tmp, k3);
        tmp = y + h * k3;
        rhs(t_next, tmp, k4);
        y_next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        rhs(t_next, y_next, f_next);
        out.stats.rhs_evals += 4;
        ++out.stats.accepted;
        // Cubic Hermite interpolation between step endpoints.
        while (next_sample < samples.size() &&
               (samples[next_sample] <= t_next || s + 1 == steps)) {
            const double ts = samples[next_sample];
            if (s + 1 == steps && ts >= t1) {
                out.times.push_back(ts);
                out.states.push_back(y_next);
            } else {
                const double th = (ts - t) / h;
                const double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
                const double h10 = th * (1 - th) * (1 - th);
                const double h01 = th * th * (3 - 2 * th);
                const double h11 = th * th * (th - 1);
                out.times.push_back(ts);
                out.states.push_back(h00 * y + h10 * h * k1 + h01 * y_next + h11 * h * f_next);
            }
            ++next_sample;
        }
        y.swap(y_next);
        k1.swap(f_next);
    }
    if (out.states.empty() || out.times.back() < t1) {
        out.times.push_back(t1);
        out.states.push_back(y);
    }
    return out;
}

} // namespace detail

/// Solves dy/dt = rhs(t, y) on [t0, t1]. `rhs(t, y, dydt)` writes into
/// `dydt`. Returns y at every entry of `samples` (sorted, within [t0, t1]);
/// the final state at t1 is always the last entry.
template <class Rhs>
Trajectory integrate_ode(Rhs&& rhs, double t0, double t1, const StateVector& y0,
                         const IntegratorConfig& cfg, std::span<const double> samples = {}) {
    cfg.validate();
    if (!(t1 > t0)) {
        throw std::invalid_argument("integrate_ode: t1 must exceed t0");
    }
    if (!std::is_sorted(samples.begin(), samples.end())) {
        throw std::invalid_argument("integrate_ode: sample times must be sorted");
    }
    if (cfg.method == IntegratorConfig::Method::fixed_rk4) {
        return detail::integrate_fixed_rk4(rhs, t0, t1, y0, cfg, samples);
    }
    return detail::integrate_adaptive(rhs, t0, t1, y0, cfg, samples);
}

} // namespace rydswap
