#include "rydswap/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

namespace rydswap {

namespace {

const SlotSpec& slot_of(const SearchSpec& spec, int w) {
    switch (w) {
    case 0: return spec.omega0;
    case 1: return spec.omega1;
    case 2: return spec.delta0;
    default: return spec.delta1;
    }
}

bool is_free_waveform(const SearchConstraints& c, int w) {
    if (w == 1 && c.tie_omegas) {
        return false;
    }
    if (w >= 2 && c.resonant) {
        return false;
    }
    if (w == 3 && c.antisymmetric_detunings) {
        return false;
    }
    return true;
}

int effective_terms(const SearchSpec& spec, int w) {
    const int n = slot_of(spec, w).n_terms;
    if (w >= 2 && spec.constraints.constant_detunings) {
        return std::min(n, 1);
    }
    return n;
}

// Sets a_0 so that the series vanishes at t = 0 (and therefore at t = tau).
void pin_start(std::vector<cplx>& c) {
    double sum = 0.0;
    for (std::size_t n = 1; n < c.size(); ++n) {
        sum += c[n].real();
    }
    c[0] = {-2.0 * sum, 0.0};
}

double uniform01(std::mt19937_64& rng) {
    // 53 random mantissa bits; avoids the implementation-defined
    // uniform_real_distribution so streams match across standard libraries.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::mt19937_64 restart_stream(std::uint64_t seed, int restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart), 0x5eedu};
    return std::mt19937_64(seq);
}

constexpr int kPenaltyGrid = 401;

} // namespace

void SearchSpec::validate() const {
    if (budget < 1) {
        throw std::invalid_argument("SearchSpec: budget must be >= 1");
    }
    if (restarts < 1) {
        throw std::invalid_argument("SearchSpec: restarts must be >= 1");
    }
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw std::invalid_argument("SearchSpec: tau must be positive");
    }
    if (!(search_rel_tol > 0.0) || !(initial_step_frac > 0.0)) {
        throw std::invalid_argument("SearchSpec: tolerances and steps must be positive");
    }
    for (int w = 0; w < 4; ++w) {
        const SlotSpec& s = slot_of(*this, w);
        if (s.n_terms < 1) {
            throw std::invalid_argument("SearchSpec: every slot needs n_terms >= 1");
        }
        if (!std::isfinite(s.lower) || !std::isfinite(s.upper) || !(s.lower <= s.upper)) {
            throw std::invalid_argument("SearchSpec: bounds must be finite with lower <= upper");
        }
    }
    if (penalties.boundary < 0.0 || penalties.peak_rabi < 0.0 || !(penalties.peak_rabi_cap >= 0.0)) {
        throw std::invalid_argument("SearchSpec: penalty weights must be non-negative");
    }
    if (ParameterLayout(*this).size() == 0) {
        throw std::invalid_argument("SearchSpec: no free parameter");
    }
}

ParameterLayout::ParameterLayout(const SearchSpec& spec) : spec_(spec) {
    for (int w = 0; w < 4; ++w) {
        if (!is_free_waveform(spec.constraints, w)) {
            continue;
        }
        const SlotSpec& s = slot_of(spec, w);
        const int terms = effective_terms(spec, w);
        const bool pinned = w < 2 && spec.constraints.pin_rabi_start;
        for (int n = 0; n < terms; ++n) {
            if (!(n == 0 && pinned)) {
                slots_.push_back({w, n, false});
                lower_.push_back(s.lower);
                upper_.push_back(s.upper);
            }
            if (n > 0 && s.complex) {
                slots_.push_back({w, n, true});
                lower_.push_back(s.lower);
                upper_.push_back(s.upper);
            }
        }
    }
    if (spec.initial && spec.warm_window > 0.0) {
        const std::vector<double> x0 = encode(*spec.initial);
        for (std::size_t i = 0; i < x0.size(); ++i) {
            lower_[i] = std::max(lower_[i], x0[i] - spec.warm_window);
            upper_[i] = std::min(upper_[i], x0[i] + spec.warm_window);
            if (lower_[i] > upper_[i]) {
                throw std::invalid_argument("SearchSpec: warm start lies outside the slot bounds");
            }
        }
    }
}

WaveformSet ParameterLayout::decode(std::span<const double> x) const {
    if (x.size() != slots_.size()) {
        throw std::invalid_argument("ParameterLayout: candidate has the wrong length");
    }
    std::vector<cplx> c[4];
    for (int w = 0; w < 4; ++w) {
        c[w].assign(static_cast<std::size_t>(effective_terms(spec_, w)), cplx{});
    }
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        const Slot& s = slots_[i];
        cplx& a = c[s.waveform][static_cast<std::size_t>(s.term)];
        if (s.imag) {
            a.imag(x[i]);
        } else {
            a.real(x[i]);
        }
    }
    const SearchConstraints& k = spec_.constraints;
    if (k.pin_rabi_start) {
        pin_start(c[0]);
        pin_start(c[1]);
    }
    if (k.tie_omegas) {
        c[1] = c[0];
    }
    if (k.resonant) {
        c[2].assign(1, cplx{});
        c[3].assign(1, cplx{});
    } else if (k.antisymmetric_detunings) {
        c[3] = c[2];
        for (auto& a : c[3]) {
            a = -a;
        }
    }
    WaveformSet ws;
    ws.omega0 = FourierSeries(c[0]);
    ws.omega1 = FourierSeries(c[1]);
    ws.delta0 = FourierSeries(c[2]);
    ws.delta1 = FourierSeries(c[3]);
    ws.tau = spec_.tau;
    return ws;
}

std::vector<double> ParameterLayout::encode(const WaveformSet& ws) const {
    const FourierSeries* series[4] = {&ws.omega0, &ws.omega1, &ws.delta0, &ws.delta1};
    std::vector<double> x(slots_.size(), 0.0);
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        const Slot& s = slots_[i];
        const auto coeffs = series[s.waveform]->coeffs();
        if (static_cast<std::size_t>(s.term) < coeffs.size()) {
            const cplx a = coeffs[static_cast<std::size_t>(s.term)];
            x[i] = s.imag ? a.imag() : a.real();
        }
    }
    return x;
}

std::vector<double> ParameterLayout::clamp(std::vector<double> x) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = std::clamp(x[i], lower_[i], upper_[i]);
    }
    return x;
}

ObjectiveBreakdown objective_breakdown(const WaveformSet& ws, const SearchSpec& spec) {
    ObjectiveBreakdown out;
    EvolutionOptions opts;
    opts.phase = spec.phase;
    opts.integrator.rel_tol = spec.search_rel_tol;
    opts.integrator.abs_tol = spec.search_rel_tol * 1e-2;
    try {
        const GateOutcome g =
            spec.target ? evaluate_gate(ws, spec.blockade, TargetGate::from_kind(*spec.target), opts)
                        : evaluate_gate_auto(ws, spec.blockade, opts);
        if (!std::isfinite(g.gate_error)) {
            return out;
        }
        out.gate_error = g.gate_error;
        out.target = g.target;
    } catch (const IntegrationError&) {
        return out;
    }

    const auto r0 = boundary_residuals(ws.omega0, ws.tau, kPenaltyGrid);
    const auto r1 = boundary_residuals(ws.omega1, ws.tau, kPenaltyGrid);
    // An identically zero waveform has no meaningful boundary violation.
    auto finite_worst = [](const BoundaryResiduals& r) {
        const double w = r.worst();
        return std::isfinite(w) ? w : 0.0;
    };
    out.boundary_penalty = spec.penalties.boundary * (finite_worst(r0) + finite_worst(r1));

    const double peak = std::max(r0.peak_value, r1.peak_value);
    const double cap = spec.penalties.peak_rabi_cap;
    out.peak_penalty = peak > cap ? spec.penalties.peak_rabi * (peak - cap) : 0.0;

    out.total = out.gate_error + out.boundary_penalty + out.peak_penalty;
    return out;
}

double objective(std::span<const double> candidate, const SearchSpec& spec) {
    const ParameterLayout layout(spec);
    return objective_breakdown(layout.decode(candidate), spec).total;
}

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, const std::vector<double>& lower,
                             const std::vector<double>& upper, const NelderMeadOptions& opts) {
    const std::size_t n = x0.size();
    if (n == 0 || lower.size() != n || upper.size() != n) {
        throw std::invalid_argument("nelder_mead: dimension mismatch");
    }
    // Adaptive coefficients (Gao & Han) keep the method effective for n > 10.
    const double dn = static_cast<double>(n);
    const double alpha = 1.0;
    const double beta = 1.0 + 2.0 / dn;
    const double gamma = 0.75 - 1.0 / (2.0 * dn);
    const double delta = 1.0 - 1.0 / dn;

    NelderMeadResult res;
    auto project = [&](std::vector<double>& x) {
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = std::clamp(x[i], lower[i], upper[i]);
        }
    };
    project(x0);
    res.x = x0;
    res.f = std::numeric_limits<double>::infinity();

    auto budget_left = [&] { return res.evaluations < opts.max_evaluations; };
    auto done = [&] {
        return !budget_left() || res.f < opts.stop_below || (opts.cancelled && opts.cancelled());
    };
    auto eval = [&](const std::vector<double>& x) {
        const double v = f(x);
        ++res.evaluations;
        const double fv = std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
        if (fv < res.f) {
            res.f = fv;
            res.x = x;
        }
        return fv;
    };

    std::vector<std::vector<double>> simplex(n + 1);
    std::vector<double> fs(n + 1);
    std::vector<double> width(n);
    for (std::size_t i = 0; i < n; ++i) {
        width[i] = upper[i] - lower[i];
    }

    double step_frac = opts.initial_step_frac;
    auto build_simplex = [&](const std::vector<double>& centre) -> bool {
        simplex[0] = centre;
        fs[0] = eval(centre);
        for (std::size_t i = 0; i < n; ++i) {
            if (done()) {
                return false;
            }
            std::vector<double> v = centre;
            const double h = step_frac * (width[i] > 0.0 ? width[i] : 1.0);
            // Step away from the nearer bound so the vertex stays distinct.
            v[i] += (v[i] + h <= upper[i]) ? h : -h;
            project(v);
            simplex[i + 1] = v;
            fs[i + 1] = eval(v);
        }
        return true;
    };

    if (!build_simplex(x0)) {
        res.history.emplace_back(res.evaluations, res.f);
        return res;
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n);
    auto point = [&](double t, const std::vector<double>& towards) {
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = centroid[i] + t * (towards[i] - centroid[i]);
        }
        project(p);
        return p;
    };

    while (!done()) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];
        res.history.emplace_back(res.evaluations, res.f);

        double extent = 0.0;
        for (std::size_t k = 0; k <= n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                const double w = width[i] > 0.0 ? width[i] : 1.0;
                extent = std::max(extent, std::abs(simplex[k][i] - simplex[best][i]) / w);
            }
        }
        if (fs[worst] - fs[best] <= opts.f_tol || extent <= opts.x_tol_frac) {
            // Collapsed: rebuild around the incumbent with a smaller edge.
            step_frac = std::max(step_frac * 0.5, 1e-4);
            if (!build_simplex(res.x)) {
                break;
            }
            continue;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == worst) {
                continue;
            }
            for (std::size_t i = 0; i < n; ++i) {
                centroid[i] += simplex[k][i] / dn;
            }
        }

        const auto xr = point(-alpha, simplex[worst]);
        const double fr = eval(xr);
        if (fr < fs[best]) {
            if (done()) {
                simplex[worst] = xr;
                fs[worst] = fr;
                break;
            }
            // Expansion: centroid + beta (xr - centroid) = centroid - alpha*beta (xw - centroid).
            const auto xe = point(-alpha * beta, simplex[worst]);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = xe;
                fs[worst] = fe;
            } else {
                simplex[worst] = xr;
                fs[worst] = fr;
            }
            continue;
        }
        if (fr < fs[second]) {
            simplex[worst] = xr;
            fs[worst] = fr;
            continue;
        }
        if (done()) {
            break;
        }
        const bool outside = fr < fs[worst];
        const auto xc = outside ? point(-alpha * gamma, simplex[worst]) : point(gamma, simplex[worst]);
        const double fc = eval(xc);
        if (fc < (outside ? fr : fs[worst])) {
            simplex[worst] = xc;
            fs[worst] = fc;
            continue;
        }
        // Shrink towards the best vertex.
        for (std::size_t k = 0; k <= n && !done(); ++k) {
            if (k == best) {
                continue;
            }
            for (std::size_t i = 0; i < n; ++i) {
                simplex[k][i] = simplex[best][i] + delta * (simplex[k][i] - simplex[best][i]);
            }
            fs[k] = eval(simplex[k]);
        }
    }
    res.history.emplace_back(res.evaluations, res.f);
    return res;
}

SearchResult search(const SearchSpec& spec, int threads) {
    spec.validate();
    const ParameterLayout layout(spec);
    const std::size_t dim = layout.size();
    const auto& lo = layout.lower();
    const auto& hi = layout.upper();

    std::vector<double> warm;
    if (spec.initial) {
        warm = layout.clamp(layout.encode(*spec.initial));
    }

    auto start_point = [&](int restart) {
        std::mt19937_64 rng = restart_stream(spec.rng_seed, restart);
        std::vector<double> x(dim);
        if (!warm.empty()) {
            x = warm;
            if (restart > 0) {
                for (std::size_t i = 0; i < dim; ++i) {
                    x[i] += (2.0 * uniform01(rng) - 1.0) * spec.initial_step_frac * (hi[i] - lo[i]);
                }
            }
        } else {
            for (std::size_t i = 0; i < dim; ++i) {
                x[i] = lo[i] + uniform01(rng) * (hi[i] - lo[i]);
            }
        }
        return layout.clamp(std::move(x));
    };

    const int n_restarts = spec.restarts;
    std::vector<NelderMeadResult> runs(static_cast<std::size_t>(n_restarts));
    std::vector<double> seconds(static_cast<std::size_t>(n_restarts), 0.0);
    // Lowest restart index that reached stop_below; later restarts are dropped.
    std::atomic<int> first_hit{n_restarts};
    auto run_one = [&](int r) {
        if (r > first_hit.load()) {
            return;
        }
        const auto t0 = std::chrono::steady_clock::now();
        NelderMeadOptions nm;
        nm.max_evaluations = spec.budget;
        nm.initial_step_frac = spec.initial_step_frac;
        nm.stop_below = spec.stop_below;
        nm.cancelled = [&first_hit, r] { return first_hit.load() < r; };
        auto f = [&](std::span<const double> x) {
            return objective_breakdown(layout.decode(x), spec).total;
        };
        auto& run = runs[static_cast<std::size_t>(r)];
        run = nelder_mead(f, start_point(r), lo, hi, nm);
        seconds[static_cast<std::size_t>(r)] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (run.f < spec.stop_below) {
            int seen = first_hit.load();
            while (r < seen && !first_hit.compare_exchange_weak(seen, r)) {
            }
        }
    };

    const int workers = std::clamp(threads, 1, n_restarts);
    if (workers == 1) {
        for (int r = 0; r < n_restarts; ++r) {
            run_one(r);
        }
    } else {
        std::atomic<int> next{0};
        std::vector<std::jthread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (int r = next++; r < n_restarts; r = next++) {
                        run_one(r);
                    }
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        pool.clear();
        for (const auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }

    SearchResult out;
    const int used = std::min(first_hit.load() + 1, n_restarts);
    std::size_t best = 0;
    for (int r = 0; r < used; ++r) {
        const auto& run = runs[static_cast<std::size_t>(r)];
        out.restarts.push_back({r, run.f, run.evaluations, run.x, seconds[static_cast<std::size_t>(r)]});
        out.evaluations_used += run.evaluations;
        for (const auto& [evals, f] : run.history) {
            out.history.push_back({evals, r, f});
        }
        // Ties resolve to the lowest restart index.
        if (run.f < runs[best].f) {
            best = static_cast<std::size_t>(r);
        }
    }
    out.budget_exhausted = std::any_of(runs.begin(), runs.begin() + used, [&](const NelderMeadResult& run) {
        return run.evaluations >= spec.budget;
    });
    out.best_objective = runs[best].f;
    out.best_waveform = layout.decode(runs[best].x);

    EvolutionOptions full;
    full.phase = spec.phase;
    const GateOutcome g =
        spec.target
            ? evaluate_gate(out.best_waveform, spec.blockade, TargetGate::from_kind(*spec.target), full)
            : evaluate_gate_auto(out.best_waveform, spec.blockade, full);
    out.best_error = g.gate_error;
    out.resolved_target = g.target;
    return out;
}

SearchSpec refit_spec(const WaveformSet& base, const BlockadeModel& target_blockade,
                      const RefitOptions& opts) {
    if (!(opts.window_mhz > 0.0) || !(opts.initial_step_mhz > 0.0)) {
        throw std::invalid_argument("refit: window and step must be positive");
    }
    SearchSpec spec;
    auto slot_for = [](const FourierSeries& s) {
        SlotSpec slot;
        slot.n_terms = static_cast<int>(s.n_terms());
        slot.complex = std::any_of(s.coeffs().begin(), s.coeffs().end(),
                                   [](const cplx& a) { return a.imag() != 0.0; });
        slot.lower = -1e4;
        slot.upper = 1e4;
        return slot;
    };
    spec.omega0 = slot_for(base.omega0);
    spec.omega1 = slot_for(base.omega1);
    spec.delta0 = slot_for(base.delta0);
    spec.delta1 = slot_for(base.delta1);
    // Keep a_0 free: the base need not sit exactly on Omega(0) = 0.
    spec.constraints.pin_rabi_start = false;
    spec.warm_window = opts.window_mhz;
    spec.target = opts.target;
    spec.blockade = target_blockade;
    spec.phase = opts.phase;
    spec.tau = base.tau;
    spec.budget = opts.budget;
    spec.restarts = opts.restarts;
    spec.rng_seed = opts.rng_seed;
    spec.stop_below = opts.stop_below;
    spec.initial = base;
    spec.initial_step_frac = opts.initial_step_mhz / (2.0 * opts.window_mhz);
    return spec;
}

SearchResult refit_for_blockade(const WaveformSet& base, const BlockadeModel& target_blockade,
                                const RefitOptions& opts, int threads) {
    return search(refit_spec(base, target_blockade, opts), threads);
}

double coefficient_displacement(const WaveformSet& a, const WaveformSet& b) {
    auto diff = [](const FourierSeries& x, const FourierSeries& y) {
        const std::size_t n = std::max(x.n_terms(), y.n_terms());
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const cplx cx = i < x.n_terms() ? x.coeffs()[i] : cplx{};
            const cplx cy = i < y.n_terms() ? y.coeffs()[i] : cplx{};
            d = std::max({d, std::abs(cx.real() - cy.real()), std::abs(cx.imag() - cy.imag())});
        }
        return d;
    };
    return std::max({diff(a.omega0, b.omega0), diff(a.omega1, b.omega1), diff(a.delta0, b.delta0),
                     diff(a.delta1, b.delta1)});
}

} // namespace rydswap
