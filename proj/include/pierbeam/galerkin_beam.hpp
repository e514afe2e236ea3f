#pragma once

#include "duffing_hill.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <thread>

namespace pierbeam {

enum class Variant { SuperBending, Stretching, SuperL2, LocalCubic, LocalLinear };

inline const char* to_string(Variant v)
{
    switch (v) {
    case Variant::SuperBending: return "super-bending";
    case Variant::Stretching: return "stretching";
    case Variant::SuperL2: return "super-l2";
    case Variant::LocalCubic: return "local-cubic";
    case Variant::LocalLinear: return "local-linear";
    }
    return "?";
}

inline Variant variant_from_string(const std::string& s)
{
    for (Variant v : {Variant::SuperBending, Variant::Stretching, Variant::SuperL2, Variant::LocalCubic, Variant::LocalLinear})
        if (s == to_string(v)) return v;
    throw ConfigError("unknown variant '" + s + "'");
}

// One active nonlinearity with its coefficient (gamma_1, gamma_2, gamma_3, cubic f, or linear gamma).
struct NonlinearityKind {
    Variant variant = Variant::SuperL2;
    double coef = 1;
};

struct ModalCoefficients {
    double a = 0.5;
    std::size_t N = 0;
    std::vector<double> lambda, mu, ups;
    std::vector<Parity> parity;
    std::vector<double> Delta;  // N x N, int e_m' e_n'
    std::vector<double> A;      // int e_n^4
    std::vector<double> B;      // N x N, 3 int e_n^3 e_m
    std::vector<double> C;      // N x N x N, 3 int e_n^2 e_m e_p
    std::vector<double> Q;      // N^4, int e_n e_m e_p e_q
    // quadrature tabulation used by the local cubic force
    Eigen::VectorXd qw;         // weights
    Eigen::MatrixXd qe;         // e_n(x_i), nodes by modes

    double delta(std::size_t m, std::size_t n) const { return Delta[m * N + n]; }
    double q(std::size_t n, std::size_t m, std::size_t p, std::size_t r) const { return Q[((n * N + m) * N + p) * N + r]; }
};

inline ModalCoefficients assemble_coefficients(const std::vector<BeamEigenpair>& spec)
{
    ModalCoefficients c;
    const std::size_t N = spec.size();
    if (N == 0) throw NumericalError(ErrorCode::PreconditionViolated, "empty spectrum");
    c.a = spec.front().a;
    c.N = N;
    for (const auto& e : spec) {
        if (std::abs(e.a - c.a) > 1e-14) throw NumericalError(ErrorCode::PreconditionViolated, "mixed pier positions");
        c.lambda.push_back(e.lambda);
        c.mu.push_back(e.mu);
        c.ups.push_back(e.upsilon);
        c.parity.push_back(e.parity);
    }
    const double ap = c.a * pi;
    const auto rule = gauss_rule_pieces<96>({-pi, -ap, ap, pi});
    const std::size_t nq = rule.x.size();
    c.qw = Eigen::Map<const Eigen::VectorXd>(rule.w.data(), Eigen::Index(nq));
    c.qe.resize(Eigen::Index(nq), Eigen::Index(N));
    std::vector<double> ev(nq * N), d1(nq * N);
    for (std::size_t i = 0; i < nq; ++i)
        for (std::size_t n = 0; n < N; ++n) {
            ev[i * N + n] = spec[n].eval(rule.x[i]);
            d1[i * N + n] = spec[n].eval(rule.x[i], 1);
            c.qe(Eigen::Index(i), Eigen::Index(n)) = ev[i * N + n];
        }
    c.Delta.assign(N * N, 0.0);
    c.Q.assign(N * N * N * N, 0.0);
    for (std::size_t i = 0; i < nq; ++i) {
        const double w = rule.w[i];
        const double* e = &ev[i * N];
        const double* de = &d1[i * N];
        for (std::size_t m = 0; m < N; ++m)
            for (std::size_t n = 0; n < N; ++n) c.Delta[m * N + n] += w * de[m] * de[n];
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t m = n; m < N; ++m)
                for (std::size_t p = m; p < N; ++p)
                    for (std::size_t r = p; r < N; ++r) c.Q[((n * N + m) * N + p) * N + r] += w * e[n] * e[m] * e[p] * e[r];
    }
    // parity selection is exact; drop quadrature noise, then symmetrize
    for (std::size_t m = 0; m < N; ++m)
        for (std::size_t n = 0; n < N; ++n)
            if (c.parity[m] != c.parity[n]) c.Delta[m * N + n] = 0;
    for (std::size_t m = 0; m < N; ++m)
        for (std::size_t n = 0; n < N; ++n) {
            if (n > m) {
                const double s = 0.5 * (c.Delta[m * N + n] + c.Delta[n * N + m]);
                c.Delta[m * N + n] = c.Delta[n * N + m] = s;
            }
        }
    auto odd_count = [&](std::size_t n, std::size_t m, std::size_t p, std::size_t r) {
        return int(c.parity[n] == Parity::Odd) + int(c.parity[m] == Parity::Odd) + int(c.parity[p] == Parity::Odd) +
               int(c.parity[r] == Parity::Odd);
    };
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t m = n; m < N; ++m)
            for (std::size_t p = m; p < N; ++p)
                for (std::size_t r = p; r < N; ++r) {
                    double v = c.Q[((n * N + m) * N + p) * N + r];
                    if (odd_count(n, m, p, r) % 2) v = 0;
                    std::array<std::size_t, 4> idx{n, m, p, r};
                    do {
                        c.Q[((idx[0] * N + idx[1]) * N + idx[2]) * N + idx[3]] = v;
                    } while (std::next_permutation(idx.begin(), idx.end()));
                }
    c.A.resize(N);
    c.B.assign(N * N, 0.0);
    c.C.assign(N * N * N, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
        c.A[n] = c.q(n, n, n, n);
        for (std::size_t m = 0; m < N; ++m) {
            c.B[n * N + m] = 3 * c.q(n, n, n, m);
            for (std::size_t p = 0; p < N; ++p) c.C[(n * N + m) * N + p] = 3 * c.q(n, n, m, p);
        }
    }
    return c;
}

// Modal state layout: [phi_0..phi_{N-1}, phidot_0..phidot_{N-1}].
inline void galerkin_rhs(const ModalCoefficients& c, const NonlinearityKind& kind, const State& y, State& dy)
{
    const std::size_t N = c.N;
    const double* phi = y.data();
    for (std::size_t n = 0; n < N; ++n) dy[n] = y[N + n];
    double* acc = dy.data() + N;
    const double g = kind.coef;
    switch (kind.variant) {
    case Variant::SuperBending: {
        double s = 0;
        for (std::size_t n = 0; n < N; ++n) s += c.mu[n] * phi[n] * phi[n];
        for (std::size_t n = 0; n < N; ++n) acc[n] = -c.mu[n] * phi[n] * (1 + g * s);
        break;
    }
    case Variant::SuperL2: {
        double s = 0;
        for (std::size_t n = 0; n < N; ++n) s += phi[n] * phi[n];
        for (std::size_t n = 0; n < N; ++n) acc[n] = -(c.mu[n] + g * s) * phi[n];
        break;
    }
    case Variant::Stretching: {
        std::vector<double> lin(N);
        double s = 0;
        for (std::size_t n = 0; n < N; ++n) {
            double v = 0;
            for (std::size_t m = 0; m < N; ++m) v += c.Delta[n * N + m] * phi[m];
            lin[n] = v;
            s += v * phi[n];
        }
        for (std::size_t n = 0; n < N; ++n) acc[n] = -c.mu[n] * phi[n] - g * s * lin[n];
        break;
    }
    case Variant::LocalCubic: {
        // u at the nodes, cubed, weighted and projected back onto the modes
        Eigen::Map<const Eigen::VectorXd> p(phi, Eigen::Index(N));
        const Eigen::VectorXd u = c.qe * p;
        const Eigen::VectorXd f = g * c.qw.array() * u.array().cube();
        Eigen::Map<Eigen::VectorXd>(acc, Eigen::Index(N)).noalias() = -(c.qe.transpose() * f);
        for (std::size_t n = 0; n < N; ++n) acc[n] -= c.mu[n] * phi[n];
        break;
    }
    case Variant::LocalLinear:
        for (std::size_t n = 0; n < N; ++n) acc[n] = -(c.mu[n] + g) * phi[n];
        break;
    }
}

// Contracted quartic tensor sum_{mpq} Q_{nmpq} phi_m phi_p phi_q, the LocalCubic force without quadrature.
inline std::vector<double> quartic_contraction(const ModalCoefficients& c, const std::vector<double>& phi)
{
    const std::size_t N = c.N;
    std::vector<double> out(N, 0.0);
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t m = 0; m < N; ++m)
            for (std::size_t p = 0; p < N; ++p)
                for (std::size_t r = 0; r < N; ++r) out[n] += c.q(n, m, p, r) * phi[m] * phi[p] * phi[r];
    return out;
}

inline double modal_energy(const ModalCoefficients& c, const NonlinearityKind& kind, const State& y)
{
    const std::size_t N = c.N;
    double kin = 0, bend = 0, l2 = 0, grad = 0;
    for (std::size_t n = 0; n < N; ++n) {
        kin += y[N + n] * y[N + n];
        bend += c.mu[n] * y[n] * y[n];
        l2 += y[n] * y[n];
        for (std::size_t m = 0; m < N; ++m) grad += c.Delta[n * N + m] * y[n] * y[m];
    }
    double E = kin / 2 + bend / 2;
    const double g = kind.coef;
    switch (kind.variant) {
    case Variant::SuperBending: E += g * bend * bend / 4; break;
    case Variant::Stretching: E += g * grad * grad / 4; break;
    case Variant::SuperL2: E += g * l2 * l2 / 4; break;
    case Variant::LocalLinear: E += g * l2 / 2; break;
    case Variant::LocalCubic: {
        const Eigen::VectorXd u = c.qe * Eigen::Map<const Eigen::VectorXd>(y.data(), Eigen::Index(N));
        E += g * c.qw.dot(u.array().square().square().matrix()) / 4;
        break;
    }
    }
    return E;
}

// Single-mode reference oscillator of mode j: W'' + k1 W + c3 W^3 = 0.
inline DuffingMode single_mode_duffing(const ModalCoefficients& c, const NonlinearityKind& kind, std::size_t j, double delta)
{
    DuffingMode m;
    m.lambda = c.lambda[j];
    m.delta = delta;
    const double g = kind.coef;
    switch (kind.variant) {
    case Variant::SuperBending: m.c3 = g * c.mu[j] * c.mu[j]; break;
    case Variant::Stretching: m.c3 = g * std::pow(c.ups[j], 4); break;
    case Variant::SuperL2: m.c3 = g; break;
    case Variant::LocalCubic: m.c3 = g * c.A[j]; break;
    case Variant::LocalLinear:
        m.c3 = 0;
        m.shift = g;
        break;
    }
    return m;
}

inline double single_mode_energy(const ModalCoefficients& c, const NonlinearityKind& kind, std::size_t j, double delta)
{
    State y(2 * c.N, 0.0);
    y[j] = delta;
    return modal_energy(c, kind, y);
}

inline double wagner_time(const ModalCoefficients& c, const NonlinearityKind& kind, std::size_t j, double delta)
{
    return duffing_period(single_mode_duffing(c, kind, j, delta)).T;
}

struct GalerkinOptions {
    double T = 16;
    std::size_t samples = 4001;
    Tolerances tol{1e-10, 1e-12};
};

inline Trajectory integrate_modal(const ModalCoefficients& c, const NonlinearityKind& kind, const State& y0, const GalerkinOptions& opt = {})
{
    if (!(opt.T > 0)) throw NumericalError(ErrorCode::PreconditionViolated, "horizon must be positive");
    if (y0.size() != 2 * c.N) throw NumericalError(ErrorCode::PreconditionViolated, "state size mismatch");
    Rhs f = [&c, &kind](const State& y, State& dy, double) { galerkin_rhs(c, kind, y, dy); };
    return integrate_dense(f, y0, opt.T, opt.samples, opt.tol);
}

// alpha_j = delta, alpha_n = r otherwise, zero velocities.
inline State prevailing_initial(std::size_t N, std::size_t j, double delta, double r)
{
    State y(2 * N, 0.0);
    for (std::size_t n = 0; n < N; ++n) y[n] = n == j ? delta : r;
    return y;
}

inline bool is_prevailing(const State& y, std::size_t N, std::size_t j, double eta)
{
    double s = 0;
    for (std::size_t n = 0; n < N; ++n)
        if (n != j) s += y[n] * y[n];
    return s < std::pow(eta, 4) * y[j] * y[j];
}

struct InstabilityReport {
    int j = -1, k = -1;
    double delta = 0;
    double tau = 0;
    double T_W = 0;
    double E = std::numeric_limits<double>::infinity();
    double ratio = 0;      // sup over (0,tau) divided by sup over (0,tau/2) for mode k
    double ER_tau = 0;     // expansion rate of the companion Hill equation, when one exists
};

namespace detail {

inline double sup_abs(const Trajectory& tr, std::size_t k, double t_end)
{
    double m = 0;
    for (std::size_t i = 0; i < tr.t.size() && tr.t[i] <= t_end; ++i) m = std::max(m, std::abs(tr.y[i][k]));
    return m;
}

// First instant after t0 where |phi_k| reaches level, linearly interpolated between samples.
inline std::optional<double> first_reach(const Trajectory& tr, std::size_t k, double level, double t0)
{
    for (std::size_t i = 1; i < tr.t.size(); ++i) {
        if (tr.t[i] <= t0) continue;
        const double v = std::abs(tr.y[i][k]);
        if (v >= level) {
            const double u = std::abs(tr.y[i - 1][k]);
            if (tr.t[i - 1] <= t0 || u >= level) return tr.t[i];
            return tr.t[i - 1] + (tr.t[i] - tr.t[i - 1]) * (level - u) / (v - u);
        }
    }
    return std::nullopt;
}

} // namespace detail

struct DetectOptions {
    double eta = 0.1;
    double tol = 1e-8;
    int max_bd_updates = 50;
};

struct DetectOutcome {
    std::optional<InstabilityReport> report;
    bool cycled = false; // BD update guard hit without a verdict
};

// BD growth test on a j-prevailing trajectory: for each residual k the level BD starts at eta delta and is
// raised to M/eta until either the abruptness ratio passes or the level is never reached after 2 T_W.
inline DetectOutcome detect_instability_bd(const Trajectory& tr, std::size_t j, double delta, double T_W, const DetectOptions& opt = {},
                                           std::optional<double> bd_start = std::nullopt)
{
    DetectOutcome out;
    const std::size_t N = tr.y.front().size() / 2;
    for (std::size_t k = 0; k < N; ++k) {
        if (k == j) continue;
        double BD = bd_start ? *bd_start : opt.eta * delta;
        for (int it = 0;; ++it) {
            if (it >= opt.max_bd_updates) {
                out.cycled = true;
                break;
            }
            auto tau = detail::first_reach(tr, k, BD, 2 * T_W);
            if (!tau) break;
            const double M = detail::sup_abs(tr, k, *tau / 2);
            if (M == 0 || BD / M > 1 / opt.eta - opt.tol) {
                if (!out.report || *tau < out.report->tau) {
                    InstabilityReport r;
                    r.j = int(j);
                    r.k = int(k);
                    r.delta = delta;
                    r.tau = *tau;
                    r.T_W = T_W;
                    r.ratio = M > 0 ? BD / M : std::numeric_limits<double>::infinity();
                    out.report = r;
                }
                break;
            }
            BD = M / opt.eta;
        }
    }
    return out;
}

// Direct check of both conditions of the instability definition over sampled instants tau in (2 T_W, T).
inline std::optional<InstabilityReport> detect_instability(const Trajectory& tr, std::size_t j, double eta, double T_W, double T)
{
    const std::size_t N = tr.y.front().size() / 2;
    std::optional<InstabilityReport> best;
    for (std::size_t k = 0; k < N; ++k) {
        if (k == j) continue;
        double sup_k = 0, sup_j = 0;
        std::size_t half = 0;
        double sup_half = 0;
        for (std::size_t i = 0; i < tr.t.size(); ++i) {
            const double t = tr.t[i];
            sup_k = std::max(sup_k, std::abs(tr.y[i][k]));
            sup_j = std::max(sup_j, std::abs(tr.y[i][j]));
            while (half < tr.t.size() && tr.t[half] <= t / 2) sup_half = std::max(sup_half, std::abs(tr.y[half++][k]));
            if (t <= 2 * T_W || t >= T) continue;
            if (sup_k > eta * sup_j && sup_half > 0 && sup_k / sup_half > 1 / eta) {
                if (!best || t < best->tau) {
                    InstabilityReport r;
                    r.j = int(j);
                    r.k = int(k);
                    r.tau = t;
                    r.T_W = T_W;
                    r.ratio = sup_k / sup_half;
                    best = r;
                }
                break;
            }
        }
    }
    return best;
}

struct ThresholdParams {
    std::size_t N = 12;
    double eta = 0.1;
    double tol = 1e-8;
    double step = 0.01;
    double r = 0.01;
    double T = 16;
    double EN_max = 1e5;
    std::size_t samples = 4001;
    // start the ramp at the first delta above r/eta^2 (true) or above the prevalence bound (false)
    bool start_at_r_over_eta2 = true;
};

struct ThresholdResult {
    std::optional<InstabilityReport> report; // empty when EN_max is reached
    double E = std::numeric_limits<double>::infinity();
    double delta_last = 0;
    std::size_t runs = 0;
    bool budget_exceeded = false;
};

inline double ramp_start(const ThresholdParams& p)
{
    const double bound = p.start_at_r_over_eta2 ? p.r / (p.eta * p.eta) : std::sqrt(double(p.N - 1)) * p.r / (p.eta * p.eta);
    // first point of the step grid strictly above the bound
    double d = std::floor(bound / p.step + 1e-9) * p.step;
    while (d <= bound * (1 + 1e-12)) d += p.step;
    return d;
}

// Companion Hill expansion rate for the nonlocal variants (modal equations decouple to a Hill form).
inline std::optional<double> companion_expansion_rate(const ModalCoefficients& c, const NonlinearityKind& kind, const InstabilityReport& r)
{
    if (kind.variant != Variant::SuperL2 && kind.variant != Variant::SuperBending) return std::nullopt;
    const double lj = c.lambda[r.j], lk = c.lambda[r.k];
    HillProblem hp = kind.variant == Variant::SuperL2 ? l2_hill(lj, lk, r.delta) : bending_hill(lj, lk, r.delta);
    hp.g2 *= kind.coef;
    hp.drive.c3 *= kind.coef;
    hp.sigma = duffing_period(hp.drive).T_half;
    return monodromy(hp, r.tau).ER_tau;
}

inline ThresholdResult energy_threshold(const ModalCoefficients& c, std::size_t j, const NonlinearityKind& kind, const ThresholdParams& p)
{
    if (!(p.eta > 0 && p.eta < 1) || !(p.step > 0) || !(p.T > 0))
        throw NumericalError(ErrorCode::PreconditionViolated, "threshold parameters out of range");
    if (j >= c.N) throw NumericalError(ErrorCode::PreconditionViolated, "prevailing mode out of range");
    ThresholdResult res;
    GalerkinOptions gopt{p.T, p.samples, {1e-10, 1e-12}};
    DetectOptions dopt{p.eta, p.tol, 50};
    for (long i = 0;; ++i) {
        const double delta = ramp_start(p) + double(i) * p.step;
        res.delta_last = delta;
        const double EN = single_mode_energy(c, kind, j, delta);
        if (EN > p.EN_max) {
            res.budget_exceeded = true;
            return res;
        }
        const double TW = wagner_time(c, kind, j, delta);
        auto tr = integrate_modal(c, kind, prevailing_initial(c.N, j, delta, p.r), gopt);
        ++res.runs;
        auto out = detect_instability_bd(tr, j, delta, TW, dopt);
        if (out.report) {
            out.report->E = EN;
            if (auto er = companion_expansion_rate(c, kind, *out.report)) out.report->ER_tau = *er;
            res.report = out.report;
            res.E = EN;
            return res;
        }
    }
}

struct SweepCell {
    double a = 0;
    std::vector<ThresholdResult> per_mode;
    double E12 = std::numeric_limits<double>::infinity();
    int argmin = -1;
};

inline std::size_t worker_count()
{
    if (const char* s = std::getenv("PIERBEAM_WORKERS")) {
        const long v = std::strtol(s, nullptr, 10);
        if (v > 0) return std::size_t(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// E_12(a): min over prevailing modes. Modes are scanned in order and each ramp is capped by the best energy so far,
// which leaves the minimum unchanged; capped modes report an infinite E_j.
inline SweepCell sweep_cell(double a, const NonlinearityKind& kind, const ThresholdParams& p, bool prune = true)
{
    SweepCell cell;
    cell.a = a;
    const auto c = assemble_coefficients(solve_spectrum(a, p.N));
    for (std::size_t j = 0; j < p.N; ++j) {
        ThresholdParams pj = p;
        if (prune) pj.EN_max = std::min(p.EN_max, cell.E12);
        auto r = energy_threshold(c, j, kind, pj);
        if (r.E < cell.E12) {
            cell.E12 = r.E;
            cell.argmin = int(j);
        }
        cell.per_mode.push_back(std::move(r));
    }
    return cell;
}

// Runs cells on a worker pool; results keep grid order.
template <class Cell, class F>
std::vector<Cell> parallel_map(std::size_t n, F&& work, std::size_t workers = worker_count())
{
    std::vector<Cell> out(n);
    std::vector<std::exception_ptr> err(n);
    std::atomic<std::size_t> next{0};
    auto run = [&]() {
        for (std::size_t i; (i = next++) < n;) {
            try {
                out[i] = work(i);
            } catch (...) {
                err[i] = std::current_exception();
            }
        }
    };
    workers = std::max<std::size_t>(1, std::min(workers, n));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    for (auto& e : err)
        if (e) std::rethrow_exception(e);
    return out;
}

inline std::vector<SweepCell> threshold_sweep(const std::vector<double>& a_grid, const NonlinearityKind& kind, const ThresholdParams& p,
                                              std::size_t workers = worker_count())
{
    return parallel_map<SweepCell>(a_grid.size(), [&](std::size_t i) { return sweep_cell(a_grid[i], kind, p); }, workers);
}

} // namespace pierbeam
