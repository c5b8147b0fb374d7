#include "rydswap/integrator.hpp"

namespace rydswap {

void IntegratorConfig::validate() const {
    if (method == Method::adaptive_rk) {
        if (!(rel_tol >= 1e-13) || !std::isfinite(rel_tol)) {
            throw std::invalid_argument("IntegratorConfig: rel_tol must be >= 1e-13");
        }
        if (!(abs_tol > 0.0) || !std::isfinite(abs_tol)) {
            throw std::invalid_argument("IntegratorConfig: abs_tol must be positive");
        }
    } else if (n_steps < 1000) {
        throw std::invalid_argument("IntegratorConfig: n_steps must be >= 1000");
    }
    if (max_steps < 1) {
        throw std::invalid_argument("IntegratorConfig: max_steps must be positive");
    }
}

IntegratorConfig IntegratorConfig::refined(double factor) const {
    IntegratorConfig out = *this;
    out.rel_tol /= factor;
    out.abs_tol /= factor;
    out.n_steps = static_cast<int>(n_steps * factor);
    return out;
}

std::vector<double> uniform_samples(double t0, double t1, int n) {
    if (n < 2) {
        throw std::invalid_argument("uniform_samples: need at least two samples");
    }
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * static_cast<double>(i) / (n - 1);
    }
    out.back() = t1;
    return out;
}

} // namespace rydswap
