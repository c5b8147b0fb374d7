#include "rydswap/blockade.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "rydswap/waveform.hpp"

namespace rydswap {

BlockadeModel BlockadeModel::finite(double b_rad_per_us, double delta_q_rad_per_us) {
    if (!std::isfinite(b_rad_per_us) || b_rad_per_us < 0.0) {
        throw std::invalid_argument("BlockadeModel: B must be real, finite and >= 0");
    }
    if (!std::isfinite(delta_q_rad_per_us)) {
        throw std::invalid_argument("BlockadeModel: delta_q must be finite");
    }
    return {Kind::finite, b_rad_per_us, delta_q_rad_per_us};
}

BlockadeModel BlockadeModel::finite_mhz(double b_mhz, double delta_q_mhz) {
    return finite(mhz_to_angular(b_mhz), mhz_to_angular(delta_q_mhz));
}

std::string BlockadeModel::describe() const {
    if (is_ideal()) {
        return "ideal";
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "B=%.12g MHz,dq=%.12g MHz", angular_to_mhz(b),
                  angular_to_mhz(delta_q));
    return buf;
}

} // namespace rydswap
