#pragma once

#include <string>

namespace rydswap {

/// Two-atom Rydberg interaction. `finite` couples |rr> to the pair state
/// |qq'> with strength B and gives |qq'> the penalty energy delta_q (both
/// rad/us). `ideal` is the B -> infinity limit, realised by truncating the
/// doubly-excited states out of the basis.
struct BlockadeModel {
    enum class Kind { ideal, finite };

    Kind kind = Kind::ideal;
    double b = 0.0;       // rad/us, finite only
    double delta_q = 0.0; // rad/us, finite only

    static BlockadeModel ideal() { return {}; }
    /// Throws std::invalid_argument for negative or non-finite B.
    static BlockadeModel finite(double b_rad_per_us, double delta_q_rad_per_us = 0.0);
    static BlockadeModel finite_mhz(double b_mhz, double delta_q_mhz = 0.0);

    [[nodiscard]] bool is_ideal() const { return kind == Kind::ideal; }

    /// "ideal" or "B=<MHz>,dq=<MHz>".
    [[nodiscard]] std::string describe() const;

    friend bool operator==(const BlockadeModel&, const BlockadeModel&) = default;
};

} // namespace rydswap
