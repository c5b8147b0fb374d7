#include "rydswap/dynamics.hpp"

#include <cmath>

namespace rydswap {

namespace {

constexpr int kMaxDim = 10;
using Buffer = Eigen::Matrix<cplx, kMaxDim, kMaxDim>;

const double kSqrt2 = std::sqrt(2.0);
constexpr cplx kI{0.0, 1.0};

cplx phasor(double phase) { return {std::cos(phase), std::sin(phase)}; }

void mirror_upper(Buffer& h, int dim) {
    for (int r = 0; r < dim; ++r) {
        for (int c = r + 1; c < dim; ++c) {
            h(c, r) = std::conj(h(r, c));
        }
    }
}

void fill_singlet(Buffer& h, const DriveSample& d) {
    h.topLeftCorner<3, 3>().setZero();
    h(0, 1) = 0.5 * d.omega0;
    h(0, 2) = 0.5 * d.omega1;
    h(1, 1) = d.delta0;
    h(2, 2) = d.delta1;
    mirror_upper(h, 3);
}

void fill_triplet(Buffer& h, const DriveSample& d, const BlockadeModel& bm, double phase) {
    using namespace basis;
    const int dim = triplet_dim(bm);
    h.topLeftCorner(dim, dim).setZero();
    const cplx e = phasor(phase); // e^{i Psi}
    h(t_0, t_r0) = 0.5 * kSqrt2 * d.omega0;
    h(t_1p, t_r0) = 0.5 * d.omega1 * e;
    h(t_1p, t_r1) = 0.5 * d.omega0 * std::conj(e);
    h(t_2, t_r1) = 0.5 * kSqrt2 * d.omega1;
    h(t_r0, t_r0) = d.delta0;
    h(t_r1, t_r1) = d.delta1;
    if (!bm.is_ideal()) {
        h(t_r0, t_rr) = 0.5 * kSqrt2 * d.omega0 * std::conj(e);
        h(t_r1, t_rr) = 0.5 * kSqrt2 * d.omega1 * e;
        h(t_rr, t_rr) = d.delta0 + d.delta1;
        h(t_rr, t_qq) = bm.b;
        h(t_qq, t_qq) = d.delta0 + d.delta1 + bm.delta_q;
    }
    mirror_upper(h, dim);
}

void fill_triplet_phase_free(Buffer& h, const DriveSample& d, const BlockadeModel& bm,
                             double rate) {
    using namespace basis;
    const int dim = triplet_dim(bm);
    h.topLeftCorner(dim, dim).setZero();
    h(t_0, t_0) = -rate;
    h(t_2, t_2) = rate;
    h(t_0, t_r0) = 0.5 * kSqrt2 * d.omega0;
    h(t_1p, t_r0) = 0.5 * d.omega1;
    h(t_1p, t_r1) = 0.5 * d.omega0;
    h(t_2, t_r1) = 0.5 * kSqrt2 * d.omega1;
    h(t_r0, t_r0) = d.delta0 - rate;
    h(t_r1, t_r1) = d.delta1 + rate;
    if (!bm.is_ideal()) {
        h(t_r0, t_rr) = 0.5 * kSqrt2 * d.omega0;
        h(t_r1, t_rr) = 0.5 * kSqrt2 * d.omega1;
        h(t_rr, t_rr) = d.delta0 + d.delta1;
        h(t_rr, t_qq) = bm.b;
        h(t_qq, t_qq) = d.delta0 + d.delta1 + bm.delta_q;
    }
    mirror_upper(h, dim);
}

// Single-atom levels 0, 1, r.
constexpr int kAtomR = 2;

int product_index(int a, int b) {
    using namespace basis;
    static constexpr int table[3][3] = {{p_00, p_01, p_0r}, {p_10, p_11, p_1r}, {p_r0, p_r1, p_rr}};
    return table[a][b];
}

void fill_full(Buffer& h, const DriveSample& d, const BlockadeModel& bm, const LaserPhases& lp) {
    const int dim = basis::full_dim(bm);
    h.topLeftCorner(dim, dim).setZero();
    // <g|H_a|r> for g = 0, 1.
    const cplx ground_to_r[2] = {0.5 * d.omega0 * phasor(-lp.theta0),
                                 0.5 * d.omega1 * phasor(-lp.theta1)};
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            const int row = product_index(a, b);
            if (row >= dim) {
                continue;
            }
            // Atom A: ground a -> r with atom B spectator in b.
            if (a != kAtomR) {
                const int col = product_index(kAtomR, b);
                if (col < dim) {
                    h(row, col) += ground_to_r[a];
                }
            }
            if (b != kAtomR) {
                const int col = product_index(a, kAtomR);
                if (col < dim) {
                    h(row, col) += ground_to_r[b];
                }
            }
        }
    }
    // Every coupling raised one excitation, and the product ordering puts more
    // excited states later, so only the upper triangle is populated so far.
    if (!bm.is_ideal()) {
        h(basis::p_rr, basis::p_qq) = bm.b;
        h(basis::p_qq, basis::p_qq) = bm.delta_q;
    }
    mirror_upper(h, dim);
}

bool is_rydberg(Channel channel, int i) {
    switch (channel) {
    case Channel::singlet:
        return basis::singlet_is_rydberg(i);
    case Channel::triplet:
    case Channel::triplet_phase_free:
        return basis::triplet_is_rydberg(i);
    case Channel::full:
        return basis::product_is_rydberg(i);
    }
    return false;
}

void fill_channel(Buffer& h, Channel channel, const WaveformSet& ws, const BlockadeModel& bm,
                  PhaseConvention conv, double t) {
    const DriveSample d = sample(ws, t);
    switch (channel) {
    case Channel::singlet:
        fill_singlet(h, d);
        return;
    case Channel::triplet:
        fill_triplet(h, d, bm,
                     conv == PhaseConvention::pointwise ? (d.delta0 - d.delta1) * t
                                                        : triplet_phase(ws, t, conv));
        return;
    case Channel::triplet_phase_free:
        fill_triplet_phase_free(h, d, bm, triplet_phase_rate(ws, t, conv));
        return;
    case Channel::full:
        fill_full(h, d, bm, laser_phases(ws, t, conv));
        return;
    }
}

} // namespace

std::string_view to_string(PhaseConvention c) {
    return c == PhaseConvention::pointwise ? "pointwise" : "integrated";
}

std::optional<PhaseConvention> parse_phase_convention(std::string_view name) {
    if (name == "pointwise") {
        return PhaseConvention::pointwise;
    }
    if (name == "integrated") {
        return PhaseConvention::integrated;
    }
    return std::nullopt;
}

namespace basis {

int triplet_dim(const BlockadeModel& bm) { return bm.is_ideal() ? 5 : 7; }
int full_dim(const BlockadeModel& bm) { return bm.is_ideal() ? 8 : 10; }

std::vector<std::string> singlet_labels() { return {"C1-", "Cr1-", "C0r-"}; }

std::vector<std::string> triplet_labels(const BlockadeModel& bm) {
    std::vector<std::string> out{"C0", "C1+", "C2", "Cr0", "Cr1", "Crr", "Cqq"};
    out.resize(static_cast<std::size_t>(triplet_dim(bm)));
    return out;
}

std::vector<std::string> product_labels(const BlockadeModel& bm) {
    std::vector<std::string> out{"00", "01", "10", "11", "0r", "r0", "1r", "r1", "rr", "qq"};
    out.resize(static_cast<std::size_t>(full_dim(bm)));
    return out;
}

HamMatrix symmetry_basis(const BlockadeModel& bm) {
    const int dim = full_dim(bm);
    const double s = 1.0 / std::sqrt(2.0);
    HamMatrix v = HamMatrix::Zero(dim, dim);
    int col = 0;
    // Singlet: (01-10), (r1-1r), (0r-r0).
    v(p_01, col) = s;
    v(p_10, col) = -s;
    ++col;
    v(p_r1, col) = s;
    v(p_1r, col) = -s;
    ++col;
    v(p_0r, col) = s;
    v(p_r0, col) = -s;
    ++col;
    // Triplet: 00, (01+10), 11, (0r+r0), (r1+1r), rr, qq.
    v(p_00, col++) = 1.0;
    v(p_01, col) = s;
    v(p_10, col) = s;
    ++col;
    v(p_11, col++) = 1.0;
    v(p_0r, col) = s;
    v(p_r0, col) = s;
    ++col;
    v(p_r1, col) = s;
    v(p_1r, col) = s;
    ++col;
    if (!bm.is_ideal()) {
        v(p_rr, col++) = 1.0;
        v(p_qq, col++) = 1.0;
    }
    return v;
}

bool singlet_is_rydberg(int i) { return i != s_1m; }
bool triplet_is_rydberg(int i) { return i >= t_r0; }
bool product_is_rydberg(int i) { return i >= p_0r; }

} // namespace basis

double triplet_phase(const WaveformSet& ws, double t, PhaseConvention conv) {
    if (conv == PhaseConvention::integrated) {
        return ws.delta0.integral(t, ws.tau) - ws.delta1.integral(t, ws.tau);
    }
    return (ws.delta0.eval(t, ws.tau) - ws.delta1.eval(t, ws.tau)) * t;
}

double triplet_phase_rate(const WaveformSet& ws, double t, PhaseConvention conv) {
    const double diff = ws.delta0.eval(t, ws.tau) - ws.delta1.eval(t, ws.tau);
    if (conv == PhaseConvention::integrated) {
        return diff;
    }
    return diff + t * (ws.delta0.derivative(t, ws.tau) - ws.delta1.derivative(t, ws.tau));
}

LaserPhases laser_phases(const WaveformSet& ws, double t, PhaseConvention conv) {
    if (conv == PhaseConvention::integrated) {
        return {ws.delta0.integral(t, ws.tau), ws.delta1.integral(t, ws.tau)};
    }
    return {ws.delta0.eval(t, ws.tau) * t, ws.delta1.eval(t, ws.tau) * t};
}

HamMatrix h_singlet(const WaveformSet& ws, double t) {
    Buffer h;
    fill_singlet(h, sample(ws, t));
    return h.topLeftCorner(3, 3);
}

HamMatrix h_triplet(const WaveformSet& ws, const BlockadeModel& bm, double t, double phase) {
    Buffer h;
    fill_triplet(h, sample(ws, t), bm, phase);
    const int dim = basis::triplet_dim(bm);
    return h.topLeftCorner(dim, dim);
}

HamMatrix h_triplet_phase_free(const WaveformSet& ws, const BlockadeModel& bm, double t,
                               double phase_rate) {
    Buffer h;
    fill_triplet_phase_free(h, sample(ws, t), bm, phase_rate);
    const int dim = basis::triplet_dim(bm);
    return h.topLeftCorner(dim, dim);
}

HamMatrix h_full(const WaveformSet& ws, const BlockadeModel& bm, double t,
                 const LaserPhases& phases) {
    Buffer h;
    fill_full(h, sample(ws, t), bm, phases);
    const int dim = basis::full_dim(bm);
    return h.topLeftCorner(dim, dim);
}

Trajectory integrate(const HamiltonianBuilder& h, const StateVector& psi0, double tau,
                     const IntegratorConfig& cfg, std::span<const double> samples) {
    if (std::abs(psi0.norm() - 1.0) > 1e-12) {
        throw std::invalid_argument("integrate: initial state must be normalised");
    }
    std::vector<double> times(samples.begin(), samples.end());
    if (times.empty() || times.front() > 0.0) {
        times.insert(times.begin(), 0.0);
    }
    if (times.back() < tau) {
        times.push_back(tau);
    }
    auto rhs = [&](double t, const StateVector& y, StateVector& dy) {
        dy.noalias() = -kI * (h(t) * y);
    };
    return integrate_ode(rhs, 0.0, tau, psi0, cfg, times);
}

HamiltonianBuilder make_builder(Channel channel, const WaveformSet& ws, const BlockadeModel& bm,
                                PhaseConvention phase) {
    const int dim = channel_dim(channel, bm);
    return [channel, ws, bm, phase, dim](double t) -> HamMatrix {
        Buffer h;
        fill_channel(h, channel, ws, bm, phase, t);
        return h.topLeftCorner(dim, dim);
    };
}

int channel_dim(Channel channel, const BlockadeModel& bm) {
    switch (channel) {
    case Channel::singlet:
        return basis::kSingletDim;
    case Channel::triplet:
    case Channel::triplet_phase_free:
        return basis::triplet_dim(bm);
    case Channel::full:
        return basis::full_dim(bm);
    }
    return 0;
}

Trajectory evolve(Channel channel, const WaveformSet& ws, const BlockadeModel& bm,
                  const StateVector& psi0, const EvolutionOptions& opts,
                  std::span<const double> samples) {
    ws.validate();
    if (psi0.size() != channel_dim(channel, bm)) {
        throw std::invalid_argument("evolve: initial state has the wrong dimension");
    }
    return integrate(make_builder(channel, ws, bm, opts.phase), psi0, ws.tau, opts.integrator,
                     samples);
}

Trajectory evolve_product(const WaveformSet& ws, const BlockadeModel& bm, const StateVector& psi0,
                          const EvolutionOptions& opts, std::span<const double> samples) {
    ws.validate();
    const int n = basis::full_dim(bm);
    if (psi0.size() != n) {
        throw std::invalid_argument("evolve_product: initial state has the wrong dimension");
    }
    if (std::abs(psi0.norm() - 1.0) > 1e-12) {
        throw std::invalid_argument("evolve_product: initial state must be normalised");
    }
    const HamMatrix v = basis::symmetry_basis(bm);
    const StateVector sym = v.adjoint() * psi0;
    const int ns = basis::kSingletDim;
    const int nt = basis::triplet_dim(bm);

    Trajectory out;
    std::vector<Trajectory> parts;
    std::vector<std::pair<int, double>> where; // (offset, weight)
    for (const auto& [channel, offset, dim] :
         {std::tuple{Channel::singlet, 0, ns}, std::tuple{Channel::triplet, ns, nt}}) {
        const StateVector part = sym.segment(offset, dim);
        const double w = part.norm();
        if (w == 0.0) {
            continue;
        }
        parts.push_back(evolve(channel, ws, bm, part / w, opts, samples));
        where.emplace_back(offset, w);
    }
    out.times = parts.front().times;
    for (std::size_t k = 0; k < out.times.size(); ++k) {
        // Block Rydberg amplitudes carry the laser phase of the transition that
        // feeds them; undo it so both blocks share the product-basis frame.
        const LaserPhases lp = laser_phases(ws, out.times[k], opts.phase);
        StateVector y = StateVector::Zero(n);
        for (std::size_t p = 0; p < parts.size(); ++p) {
            const auto& [offset, w] = where[p];
            StateVector c = w * parts[p].states[k];
            if (offset == 0) {
                c[basis::s_ryd0] *= phasor(lp.theta0);
                c[basis::s_ryd1] *= phasor(lp.theta1);
            } else {
                c[basis::t_r0] *= phasor(lp.theta0);
                c[basis::t_r1] *= phasor(lp.theta1);
                if (nt > basis::t_rr) {
                    c[basis::t_rr] *= phasor(lp.theta0 + lp.theta1);
                    c[basis::t_qq] *= phasor(lp.theta0 + lp.theta1);
                }
            }
            y.segment(offset, c.size()) = c;
        }
        out.states.push_back(v * y);
    }
    for (const auto& p : parts) {
        out.stats.accepted += p.stats.accepted;
        out.stats.rejected += p.stats.rejected;
        out.stats.rhs_evals += p.stats.rhs_evals;
    }
    return out;
}

Propagation propagate(Channel channel, const WaveformSet& ws, const BlockadeModel& bm,
                      const Eigen::MatrixXcd& initial, const EvolutionOptions& opts) {
    ws.validate();
    const int dim = channel_dim(channel, bm);
    if (initial.rows() != dim) {
        throw std::invalid_argument("propagate: initial states have the wrong dimension");
    }
    const auto cols = static_cast<int>(initial.cols());
    const int n_amp = dim * cols;

    StateVector y0(n_amp + cols);
    y0.head(n_amp) = Eigen::Map<const StateVector>(initial.data(), n_amp);
    y0.tail(cols).setZero();

    std::vector<int> rydberg_rows;
    for (int i = 0; i < dim; ++i) {
        if (is_rydberg(channel, i)) {
            rydberg_rows.push_back(i);
        }
    }

    Buffer h;
    auto rhs = [&](double t, const StateVector& y, StateVector& dy) {
        fill_channel(h, channel, ws, bm, opts.phase, t);
        Eigen::Map<const Eigen::MatrixXcd> amps(y.data(), dim, cols);
        Eigen::Map<Eigen::MatrixXcd> damps(dy.data(), dim, cols);
        damps.noalias() = h.topLeftCorner(dim, dim) * amps;
        damps *= -kI;
        for (int c = 0; c < cols; ++c) {
            double p = 0.0;
            for (int r : rydberg_rows) {
                p += std::norm(amps(r, c));
            }
            dy[n_amp + c] = p;
        }
    };
    const double end[1] = {ws.tau};
    Trajectory traj = integrate_ode(rhs, 0.0, ws.tau, y0, opts.integrator, end);
    const StateVector& yf = traj.final_state();

    Propagation out;
    out.final_states = Eigen::Map<const Eigen::MatrixXcd>(yf.data(), dim, cols);
    out.rydberg_time = yf.tail(cols).real();
    out.stats = traj.stats;
    return out;
}

GaugeReport gauge_transform_check(const WaveformSet& ws, const BlockadeModel& bm,
                                  const EvolutionOptions& opts, double tolerance) {
    const int dim = basis::triplet_dim(bm);
    Eigen::MatrixXcd init = Eigen::MatrixXcd::Identity(dim, 3);

    const Propagation a = propagate(Channel::triplet, ws, bm, init, opts);
    const Propagation b = propagate(Channel::triplet_phase_free, ws, bm, init, opts);

    GaugeReport report;
    report.tolerance = tolerance;
    report.explicit_phase = a.final_states.topRows(3);
    // Undo the computational rephasing (Psi, 0, -Psi) of the phase-free gauge.
    const double psi_end = triplet_phase(ws, ws.tau, opts.phase);
    const cplx undo[3] = {phasor(-psi_end), 1.0, phasor(psi_end)};
    for (int r = 0; r < 3; ++r) {
        report.phase_free.row(r) = undo[r] * b.final_states.row(r);
    }
    report.max_deviation = (report.explicit_phase - report.phase_free).cwiseAbs().maxCoeff();
    report.agrees = report.max_deviation <= tolerance;
    if (!report.agrees) {
        throw GaugeInconsistencyError("gauge check: explicit-phase and phase-free triplet runs "
                                      "differ by " +
                                      std::to_string(report.max_deviation));
    }
    return report;
}

} // namespace rydswap
