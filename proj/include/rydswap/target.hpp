#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace rydswap {

using Matrix4c = Eigen::Matrix<std::complex<double>, 4, 4>;

enum class GateKind { standard_swap, opposite_swap, custom };

std::string_view to_string(GateKind kind);
std::optional<GateKind> parse_gate_kind(std::string_view name);

/// Target two-qubit gate over the basis order |00>, |01>, |10>, |11>.
struct TargetGate {
    GateKind kind = GateKind::standard_swap;
    Matrix4c matrix = Matrix4c::Identity();

    /// |01> <-> |10|, |00> and |11> fixed.
    static TargetGate standard_swap();
    /// |00> <-> |11>, |01> and |10> fixed.
    static TargetGate opposite_swap();
    /// Throws std::invalid_argument unless `m` is unitary to 1e-12.
    static TargetGate custom(const Matrix4c& m);
    static TargetGate from_kind(GateKind kind);
};

} // namespace rydswap
