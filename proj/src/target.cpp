#include "rydswap/target.hpp"

#include <stdexcept>

namespace rydswap {

std::string_view to_string(GateKind kind) {
    switch (kind) {
    case GateKind::standard_swap:
        return "standard";
    case GateKind::opposite_swap:
        return "opposite";
    case GateKind::custom:
        return "custom";
    }
    return "unknown";
}

std::optional<GateKind> parse_gate_kind(std::string_view name) {
    if (name == "standard" || name == "standard_swap") {
        return GateKind::standard_swap;
    }
    if (name == "opposite" || name == "opposite_swap") {
        return GateKind::opposite_swap;
    }
    return std::nullopt;
}

TargetGate TargetGate::standard_swap() {
    Matrix4c m = Matrix4c::Zero();
    m(0, 0) = 1.0;
    m(2, 1) = 1.0;
    m(1, 2) = 1.0;
    m(3, 3) = 1.0;
    return {GateKind::standard_swap, m};
}

TargetGate TargetGate::opposite_swap() {
    Matrix4c m = Matrix4c::Zero();
    m(3, 0) = 1.0;
    m(1, 1) = 1.0;
    m(2, 2) = 1.0;
    m(0, 3) = 1.0;
    return {GateKind::opposite_swap, m};
}

TargetGate TargetGate::custom(const Matrix4c& m) {
    if (!(m.adjoint() * m - Matrix4c::Identity()).isZero(1e-12)) {
        throw std::invalid_argument("TargetGate: custom matrix is not unitary");
    }
    return {GateKind::custom, m};
}

TargetGate TargetGate::from_kind(GateKind kind) {
    switch (kind) {
    case GateKind::standard_swap:
        return standard_swap();
    case GateKind::opposite_swap:
        return opposite_swap();
    case GateKind::custom:
        break;
    }
    throw std::invalid_argument("TargetGate::from_kind: custom gates need a matrix");
}

} // namespace rydswap
