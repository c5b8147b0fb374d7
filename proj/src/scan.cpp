#include "rydswap/scan.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <thread>

#include "rydswap/gate.hpp"
#include "rydswap/integrator.hpp"

namespace rydswap {

std::string_view to_string(ScanAxisKind k) {
    switch (k) {
    case ScanAxisKind::rabi_ratio: return "rabi_ratio";
    case ScanAxisKind::detuning_offset: return "detuning_offset";
    case ScanAxisKind::blockade_b: return "B";
    }
    return "unknown";
}

std::optional<ScanAxisKind> parse_scan_axis(std::string_view name) {
    if (name == "rabi_ratio" || name == "ratio") return ScanAxisKind::rabi_ratio;
    if (name == "detuning_offset" || name == "offset") return ScanAxisKind::detuning_offset;
    if (name == "B" || name == "blockade") return ScanAxisKind::blockade_b;
    return std::nullopt;
}

std::string_view to_string(AxisApply a) {
    switch (a) {
    case AxisApply::both: return "both";
    case AxisApply::first: return "first";
    case AxisApply::second: return "second";
    case AxisApply::antisymmetric: return "antisymmetric";
    }
    return "unknown";
}

std::optional<AxisApply> parse_axis_apply(std::string_view name) {
    if (name == "both") return AxisApply::both;
    if (name == "first" || name == "0") return AxisApply::first;
    if (name == "second" || name == "1") return AxisApply::second;
    if (name == "antisymmetric") return AxisApply::antisymmetric;
    return std::nullopt;
}

std::vector<double> ScanAxis::values() const {
    std::vector<double> v(static_cast<std::size_t>(points));
    const double d = static_cast<double>(points - 1);
    for (int i = 0; i < points; ++i) {
        // Weighted form hits both end points (and symmetric centres) exactly.
        v[static_cast<std::size_t>(i)] = (min * (d - i) + max * i) / d;
    }
    return v;
}

std::string ScanAxis::column() const {
    std::string suffix;
    if (kind != ScanAxisKind::blockade_b && apply != AxisApply::both) {
        suffix = "_" + std::string(to_string(apply));
    }
    switch (kind) {
    case ScanAxisKind::rabi_ratio: return "rabi_ratio" + suffix;
    case ScanAxisKind::detuning_offset: return "detuning_offset_mhz" + suffix;
    case ScanAxisKind::blockade_b: return "B_mhz";
    }
    return "axis";
}

double ScanAxis::display(double v) const {
    return kind == ScanAxisKind::rabi_ratio ? v : angular_to_mhz(v);
}

ScanAxis default_axis(ScanAxisKind kind, int points) {
    ScanAxis a;
    a.kind = kind;
    a.points = points;
    switch (kind) {
    case ScanAxisKind::rabi_ratio:
        a.min = 0.95;
        a.max = 1.05;
        break;
    case ScanAxisKind::detuning_offset:
        a.min = mhz_to_angular(-2.0);
        a.max = mhz_to_angular(2.0);
        break;
    case ScanAxisKind::blockade_b:
        a.min = mhz_to_angular(50.0);
        a.max = mhz_to_angular(500.0);
        break;
    }
    return a;
}

void ScanSpec::validate() const {
    waveforms.validate();
    if (axes.empty() || axes.size() > 2) {
        throw std::invalid_argument("ScanSpec: need one or two axes");
    }
    for (const auto& a : axes) {
        if (a.points < 2) {
            throw std::invalid_argument("ScanSpec: each axis needs at least 2 points");
        }
        if (!std::isfinite(a.min) || !std::isfinite(a.max)) {
            throw std::invalid_argument("ScanSpec: axis range must be finite");
        }
        if (a.kind == ScanAxisKind::blockade_b && (a.min < 0.0 || a.max < 0.0)) {
            throw std::invalid_argument("ScanSpec: B values must be >= 0");
        }
        if (a.kind == ScanAxisKind::rabi_ratio && a.apply == AxisApply::antisymmetric) {
            throw std::invalid_argument("ScanSpec: antisymmetric applies to detuning offsets only");
        }
    }
    if (axes.size() == 2) {
        const auto& a = axes[0];
        const auto& b = axes[1];
        const bool both_b = a.kind == ScanAxisKind::blockade_b && b.kind == ScanAxisKind::blockade_b;
        if (both_b || (a.kind == b.kind && a.apply == b.apply)) {
            throw std::invalid_argument("ScanSpec: axes must be distinct");
        }
    }
}

ScanPoint apply_axis(const ScanAxis& axis, double value, ScanPoint p) {
    switch (axis.kind) {
    case ScanAxisKind::rabi_ratio:
        if (axis.apply != AxisApply::second) {
            p.waveforms.omega0 = p.waveforms.omega0.scaled(value);
        }
        if (axis.apply != AxisApply::first) {
            p.waveforms.omega1 = p.waveforms.omega1.scaled(value);
        }
        break;
    case ScanAxisKind::detuning_offset:
        if (axis.apply != AxisApply::second) {
            p.waveforms.delta0 = p.waveforms.delta0.shifted(value);
        }
        if (axis.apply == AxisApply::both || axis.apply == AxisApply::second) {
            p.waveforms.delta1 = p.waveforms.delta1.shifted(value);
        } else if (axis.apply == AxisApply::antisymmetric) {
            p.waveforms.delta1 = p.waveforms.delta1.shifted(-value);
        }
        break;
    case ScanAxisKind::blockade_b:
        p.blockade = BlockadeModel::finite(value, p.blockade.is_ideal() ? 0.0 : p.blockade.delta_q);
        break;
    }
    return p;
}

std::size_t ScanResult::index(std::size_t i, std::size_t j) const {
    return values.size() == 2 ? i * values[1].size() + j : i;
}

std::string ScanResult::to_csv() const {
    std::string out;
    for (const auto& a : axes) {
        out += a.column() + ",";
    }
    out += "gate_error,leakage\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    const std::size_t n0 = values[0].size();
    const std::size_t n1 = values.size() == 2 ? values[1].size() : 1;
    for (std::size_t i = 0; i < n0; ++i) {
        for (std::size_t j = 0; j < n1; ++j) {
            out += num(axes[0].display(values[0][i])) + ",";
            if (values.size() == 2) {
                out += num(axes[1].display(values[1][j])) + ",";
            }
            const std::size_t k = index(i, j);
            out += num(gate_error[k]) + "," + num(leakage[k]) + "\n";
        }
    }
    return out;
}

ScanResult run_scan(const ScanSpec& spec, int threads) {
    spec.validate();
    ScanResult r;
    r.axes = spec.axes;
    for (const auto& a : spec.axes) {
        r.values.push_back(a.values());
    }
    const std::size_t n0 = r.values[0].size();
    const std::size_t n1 = r.values.size() == 2 ? r.values[1].size() : 1;
    const std::size_t total = n0 * n1;
    r.gate_error.assign(total, std::numeric_limits<double>::quiet_NaN());
    r.leakage.assign(total, std::numeric_limits<double>::quiet_NaN());
    std::vector<char> failed(total, 0);

    auto eval_point = [&](std::size_t k) {
        const std::size_t i = r.values.size() == 2 ? k / n1 : k;
        const std::size_t j = r.values.size() == 2 ? k % n1 : 0;
        ScanPoint p{spec.waveforms, spec.blockade};
        p = apply_axis(spec.axes[0], r.values[0][i], p);
        if (r.values.size() == 2) {
            p = apply_axis(spec.axes[1], r.values[1][j], p);
        }
        try {
            const GateOutcome g =
                spec.target ? evaluate_gate(p.waveforms, p.blockade, TargetGate::from_kind(*spec.target),
                                            spec.evolution)
                            : evaluate_gate_auto(p.waveforms, p.blockade, spec.evolution);
            r.gate_error[k] = g.gate_error;
            r.leakage[k] = g.leakage;
        } catch (const IntegrationError&) {
            failed[k] = 1;
        }
    };

    const int workers = static_cast<int>(std::clamp<std::size_t>(
        static_cast<std::size_t>(std::max(threads, 1)), 1, total));
    if (workers == 1) {
        for (std::size_t k = 0; k < total; ++k) {
            eval_point(k);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        {
            std::vector<std::jthread> pool;
            for (int w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        for (std::size_t k = next++; k < total; k = next++) {
                            eval_point(k);
                        }
                    } catch (...) {
                        errors[static_cast<std::size_t>(w)] = std::current_exception();
                    }
                });
            }
        }
        for (const auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }
    for (const char f : failed) {
        r.failures += f;
    }
    return r;
}

namespace {

ScanResult run_kind(const ScanSpec& spec, ScanAxisKind kind, int threads) {
    if (spec.axes.empty() || spec.axes.front().kind != kind) {
        throw std::invalid_argument("scan: first axis must be " + std::string(to_string(kind)));
    }
    return run_scan(spec, threads);
}

} // namespace

ScanResult scan_rabi_ratio(const ScanSpec& spec, int threads) {
    return run_kind(spec, ScanAxisKind::rabi_ratio, threads);
}

ScanResult scan_detuning_offset(const ScanSpec& spec, int threads) {
    return run_kind(spec, ScanAxisKind::detuning_offset, threads);
}

ScanResult scan_blockade(const ScanSpec& spec, int threads) {
    return run_kind(spec, ScanAxisKind::blockade_b, threads);
}

} // namespace rydswap
