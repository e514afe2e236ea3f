#pragma once

#include "galerkin_beam.hpp"
#include "spectral_torsion.hpp"

namespace pierbeam {

// Hanger restoring force f(s) = c s - 1 + sqrt(1 + c^2 s^2); c = 0 is the rigid case.
struct HangerModel {
    double sigma = 0;

    // sqrt(1 + c^2 s^2) - 1 without cancellation
    double excess(double s) const
    {
        const double x = sigma * s;
        return x * x / (1 + std::sqrt(1 + x * x));
    }
    double f(double s) const { return sigma * s + excess(s); }
    double df(double s) const
    {
        const double x = sigma * s;
        return sigma + sigma * x / std::sqrt(1 + x * x);
    }
    // antiderivative of excess, vanishing at 0
    double H(double s) const
    {
        const double x = sigma * s;
        if (sigma == 0) return 0;
        if (std::abs(x) < 1e-2) {
            const double x2 = x * x;
            return x2 * s * (1.0 / 6 + x2 * (-1.0 / 40 + x2 * (1.0 / 112 - x2 * 5.0 / 1152)));
        }
        return 0.5 * (s * std::sqrt(1 + x * x) + std::asinh(x) / sigma) - s;
    }
    double F(double s) const { return sigma * s * s / 2 + H(s); }
};

// Longitudinal/torsional pair tabulated on the per-span quadrature grid.
struct FishbonePair {
    BeamEigenpair beam;
    TorsionEigenpair torsion;
    double A = 0;
    HangerModel hanger;
    std::vector<double> w, e, eta;

    double lambda4() const { return beam.mu; }
    double kappa2() const { return torsion.mu; }
};

inline FishbonePair make_fishbone_pair(const BeamEigenpair& e, const TorsionEigenpair& t, HangerModel h)
{
    if (h.sigma < 0) throw NumericalError(ErrorCode::PreconditionViolated, "hanger elasticity must be non-negative");
    FishbonePair p;
    p.beam = e;
    p.torsion = t;
    p.hanger = h;
    p.A = coupling_coefficient(e, t).value;
    const double ap = e.a * pi;
    const auto rule = gauss_rule_pieces<96>({-pi, -ap, ap, pi});
    p.w = rule.w;
    for (double x : rule.x) {
        p.e.push_back(e.eval(x));
        p.eta.push_back(t.eval(x));
    }
    return p;
}

inline double gamma_fn(const FishbonePair& p, double w, double z)
{
    double s = 0;
    for (std::size_t i = 0; i < p.w.size(); ++i)
        s += p.w[i] * (p.hanger.excess(w * p.e[i] + z * p.eta[i]) + p.hanger.excess(w * p.e[i] - z * p.eta[i])) * p.e[i];
    return s;
}

inline double xi_fn(const FishbonePair& p, double w, double z)
{
    double s = 0;
    for (std::size_t i = 0; i < p.w.size(); ++i)
        s += p.w[i] * (p.hanger.excess(w * p.e[i] + z * p.eta[i]) - p.hanger.excess(w * p.e[i] - z * p.eta[i])) * p.eta[i];
    return s;
}

// Both functionals in one pass over the nodes.
inline std::pair<double, double> gamma_xi(const FishbonePair& p, double w, double z)
{
    double g = 0, x = 0;
    for (std::size_t i = 0; i < p.w.size(); ++i) {
        const double sp = p.hanger.excess(w * p.e[i] + z * p.eta[i]), sm = p.hanger.excess(w * p.e[i] - z * p.eta[i]);
        g += p.w[i] * (sp + sm) * p.e[i];
        x += p.w[i] * (sp - sm) * p.eta[i];
    }
    return {g, x};
}

inline double psi_fn(const FishbonePair& p, double w)
{
    double s = 0;
    for (std::size_t i = 0; i < p.w.size(); ++i) s += p.w[i] * p.hanger.excess(w * p.e[i]) * p.e[i];
    return 2 * s;
}

inline double dpsi_fn(const FishbonePair& p, double w)
{
    const double c = p.hanger.sigma;
    double s = 0;
    for (std::size_t i = 0; i < p.w.size(); ++i) {
        const double x = c * w * p.e[i];
        s += p.w[i] * c * x * std::pow(p.e[i], 2) / std::sqrt(1 + x * x);
    }
    return 2 * s;
}

inline double b_sigma(const FishbonePair& p, double w)
{
    const double c = p.hanger.sigma;
    double s = 0;
    for (std::size_t i = 0; i < p.w.size(); ++i) {
        const double x = c * w * p.e[i];
        s += p.w[i] * p.e[i] * p.eta[i] * p.eta[i] * w / std::sqrt(1 + x * x);
    }
    return s;
}

// 2 int H(w e): hanger part of the single-mode potential beyond the linear 2 c term.
inline double hanger_potential(const FishbonePair& p, double w)
{
    double s = 0;
    for (std::size_t i = 0; i < p.w.size(); ++i) s += p.w[i] * p.hanger.H(w * p.e[i]);
    return 2 * s;
}

// ---- two-mode dynamics -----------------------------------------------------

// State [w, z, w', z'].
inline void two_mode_rhs(const FishbonePair& p, const State& y, State& dy)
{
    const double w = y[0], z = y[1];
    const double c = p.hanger.sigma;
    const double k = 1 + 2 * p.A * p.A;
    dy[0] = y[2];
    dy[1] = y[3];
    dy[2] = -(p.lambda4() + 2 * c) * w - k * z * z * w - w * w * w;
    dy[3] = -(p.kappa2() + 2 * c) * z - k * w * w * z - z * z * z;
    if (c > 0) {
        const auto [g, x] = gamma_xi(p, w, z);
        dy[2] -= g;
        dy[3] -= x;
    }
}

inline double two_mode_energy(const FishbonePair& p, const State& y)
{
    const double w = y[0], z = y[1];
    const double c = p.hanger.sigma;
    double E = (y[2] * y[2] + y[3] * y[3]) / 2 + (p.lambda4() + 2 * c) * w * w / 2 + (p.kappa2() + 2 * c) * z * z / 2 +
               (w * w * w * w + z * z * z * z) / 4 + (1 + 2 * p.A * p.A) * w * w * z * z / 2;
    if (c > 0)
        for (std::size_t i = 0; i < p.w.size(); ++i)
            E += p.w[i] * (p.hanger.H(w * p.e[i] + z * p.eta[i]) + p.hanger.H(w * p.e[i] - z * p.eta[i]));
    return E;
}

// Energy of the purely longitudinal state w = delta at rest.
inline double longitudinal_energy(const FishbonePair& p, double delta)
{
    return p.lambda4() * delta * delta / 2 + p.hanger.sigma * delta * delta + std::pow(delta, 4) / 4 + hanger_potential(p, delta);
}

inline Trajectory integrate_two_mode(const FishbonePair& p, double delta, double z0, double T = 16, std::size_t n = 4001,
                                     Tolerances tol = {1e-10, 1e-12})
{
    Rhs f = [&p](const State& y, State& dy, double) { two_mode_rhs(p, y, dy); };
    return integrate_dense(f, {delta, z0, 0, 0}, T, n, tol);
}

// ---- slackening Duffing period -----------------------------------------------

struct SlackPeriod {
    double tau = 0;
    double gamma_delta = 0;
};

inline SlackPeriod slack_duffing_period(const FishbonePair& p, double delta)
{
    if (!(delta > 0)) throw NumericalError(ErrorCode::PreconditionViolated, "amplitude must be positive");
    const double k1 = p.lambda4() + 2 * p.hanger.sigma;
    auto G = [&](double s) { return k1 * s * s / 2 + s * s * s * s / 4 + hanger_potential(p, s); };
    const double Gd = G(delta);
    SlackPeriod r;
    if (p.hanger.sigma == 0) {
        r.gamma_delta = -delta;
    } else {
        double lo = -delta;
        while (G(lo) < Gd) lo *= 2;
        r.gamma_delta = refine_root([&](double s) { return G(s) - Gd; }, lo, 0.0, 1e-15);
    }
    const double gm = r.gamma_delta;
    // polynomial part factored to avoid cancellation near the turning points
    auto gap = [&](double s) {
        const double poly = (delta - s) * (k1 * (delta + s) / 2 + (delta * delta + s * s) * (delta + s) / 4);
        return poly + hanger_potential(p, delta) - hanger_potential(p, s);
    };
    // s = delta - u^2 on [0, delta] and s = gm + u^2 on [gm, 0] remove the endpoint singularities
    const double right = gauss<96>([&](double u) { return 2 * u / std::sqrt(gap(delta - u * u)); }, 0, std::sqrt(delta));
    const double left = gauss<96>([&](double u) { return 2 * u / std::sqrt(gap(gm + u * u)); }, 0, std::sqrt(-gm));
    r.tau = std::sqrt(2.0) * (right + left);
    return r;
}

// Full period of the longitudinal reference mode: Jacobi form when rigid, quadrature otherwise.
inline double longitudinal_period(const FishbonePair& p, double delta)
{
    if (p.hanger.sigma == 0) return duffing_period(DuffingMode{p.beam.lambda, delta, 1.0, 0.0, {}}).T;
    return slack_duffing_period(p, delta).tau;
}

// ---- torsional Hill equation ---------------------------------------------------

inline HillProblem torsional_hill(const FishbonePair& p, double delta)
{
    HillProblem hp;
    const double c = p.hanger.sigma;
    hp.q0 = p.kappa2() + 2 * c;
    hp.g2 = 1 + 2 * p.A * p.A;
    hp.drive = DuffingMode{p.beam.lambda, delta, 1.0, 2 * c, {}};
    if (c > 0) {
        const FishbonePair* pp = &p;
        hp.drive.extra = [pp](double w) { return psi_fn(*pp, w); };
        hp.extra = [pp, c](double w) { return 2 * c * c * b_sigma(*pp, w); };
        const double tau = slack_duffing_period(p, delta).tau;
        hp.sigma = p.beam.parity == Parity::Odd ? tau / 2 : tau;
    } else {
        hp.sigma = duffing_period(hp.drive).T_half;
    }
    return hp;
}

// Sufficient stability bound for kappa < lambda^2.
inline bool zhukovskii_stable(double lambda4, double kappa2, double delta)
{
    return kappa2 < lambda4 && delta * delta <= 0.4 * (lambda4 - kappa2);
}

// Closed-form sufficient conditions for the rigid torsional Hill equation, integer m >= 0.
inline bool fishbone_burdina_stable(double lambda4, double kappa2, double delta, int m)
{
    const double r = delta * delta / kappa2, l = lambda4 / kappa2;
    auto rot = [&](double c) {
        return 2 * std::sqrt(2.0) * gauss<64>([&](double ph) {
            const double s2 = std::sin(ph) * std::sin(ph);
            return std::sqrt((1 + c * r * s2) / (2 * l + r * (1 + s2)));
        }, 0, pi / 2);
    };
    const double lg = 0.5 * std::log(1 + 3 * r);
    return lg + rot(3) <= (m + 1) * pi && rot(1) - lg >= m * pi;
}

struct TorsionalLinear {
    double delta_lin = std::numeric_limits<double>::infinity();
    double E = std::numeric_limits<double>::infinity();
    // first unstable point of the scan grid and its energy
    double delta_grid = std::numeric_limits<double>::infinity();
    double E_grid = std::numeric_limits<double>::infinity();
};

// Least delta with |trace| > 2, scanned with `step` up to delta_max and bisected.
// The scan also stops once the longitudinal energy passes E_max.
inline TorsionalLinear torsional_linear_threshold(const FishbonePair& p, double step = 0.01, double delta_max = 6, double rel_tol = 1e-6,
                                                  double E_max = std::numeric_limits<double>::infinity())
{
    TorsionalLinear r;
    auto unstable = [&](double d) { return std::abs(monodromy(torsional_hill(p, d)).trace) > 2; };
    double prev = 0;
    const long n = std::lround(delta_max / step);
    for (long i = 1; i <= n; ++i) {
        const double d = double(i) * step;
        if (longitudinal_energy(p, d) > E_max) break;
        if (unstable(d)) {
            double lo = prev, hi = d;
            while (hi - lo > rel_tol * hi) {
                const double mid = 0.5 * (lo + hi);
                (unstable(mid) ? hi : lo) = mid;
            }
            r.delta_lin = hi;
            r.E = longitudinal_energy(p, hi);
            r.delta_grid = d;
            r.E_grid = longitudinal_energy(p, d);
            return r;
        }
        prev = d;
    }
    return r;
}

struct TorsionalReport {
    int j = -1;
    double delta = 0;
    double tau = 0;
    double T_W = 0;
    double E = std::numeric_limits<double>::infinity();
    double ER_tau = 0;
};

struct TorsionalParams {
    double eta = 0.1;
    double tol = 1e-8;
    double step = 0.01;
    double r = 0.01;
    double T = 16;
    double EN_max = 1e4;
    std::size_t samples = 4001;
    int max_bd_updates = 50;
};

// Growth-ratio test on the torsional component, BD seeded at r/eta.
inline std::optional<double> torsional_instability_time(const Trajectory& tr, double T_W, const TorsionalParams& p)
{
    double BD = p.r / p.eta;
    for (int it = 0; it < p.max_bd_updates; ++it) {
        auto tau = detail::first_reach(tr, 1, BD, 2 * T_W);
        if (!tau) return std::nullopt;
        const double M = detail::sup_abs(tr, 1, *tau / 2);
        if (BD / M > 1 / p.eta - p.tol) return tau;
        BD = M / p.eta;
    }
    return std::nullopt;
}

inline std::optional<TorsionalReport> torsional_nonlinear_threshold(const FishbonePair& pair, const TorsionalParams& p)
{
    ThresholdParams tp;
    tp.eta = p.eta;
    tp.step = p.step;
    tp.r = p.r;
    const double d0 = ramp_start(tp);
    for (long i = 0;; ++i) {
        const double delta = d0 + double(i) * p.step;
        const double E = longitudinal_energy(pair, delta);
        if (E > p.EN_max) return std::nullopt;
        const double TW = longitudinal_period(pair, delta);
        auto tr = integrate_two_mode(pair, delta, p.r, p.T, p.samples);
        if (auto tau = torsional_instability_time(tr, TW, p)) {
            TorsionalReport rep;
            rep.j = pair.beam.n;
            rep.delta = delta;
            rep.tau = *tau;
            rep.T_W = TW;
            rep.E = E;
            rep.ER_tau = monodromy(torsional_hill(pair, delta), *tau).ER_tau;
            return rep;
        }
    }
}

struct TorsionalThreshold {
    double a = 0;
    double sigma = 0;
    TorsionalLinear linear;
    int linear_mode = -1;
    std::optional<TorsionalReport> nonlinear;
    int nonlinear_mode = -1;
};

// Thresholds over prevailing longitudinal modes 0..N-1 against torsional rank `rank` (the second mode by default).
inline TorsionalThreshold torsional_threshold(double a, HangerModel h, const TorsionalParams& p, std::size_t N = 12, int rank = 1)
{
    TorsionalThreshold out;
    out.a = a;
    out.sigma = h.sigma;
    const auto spec = solve_spectrum(a, N);
    const auto tors = torsion_spectrum(a, std::size_t(rank) + 1);
    for (std::size_t j = 0; j < N; ++j) {
        const auto pair = make_fishbone_pair(spec[j], tors[std::size_t(rank)], h);
        auto lin = torsional_linear_threshold(pair, 0.01, 6, 1e-6, out.linear.E);
        if (lin.E < out.linear.E) {
            out.linear = lin;
            out.linear_mode = int(j);
        }
        TorsionalParams pj = p;
        if (out.nonlinear) pj.EN_max = std::min(p.EN_max, out.nonlinear->E);
        if (longitudinal_energy(pair, ramp_start(ThresholdParams{12, p.eta, p.tol, p.step, p.r})) > pj.EN_max) continue;
        auto rep = torsional_nonlinear_threshold(pair, pj);
        if (rep && (!out.nonlinear || rep->E < out.nonlinear->E)) {
            out.nonlinear = rep;
            out.nonlinear_mode = int(j);
        }
    }
    return out;
}

// ---- full multi-mode system, for cross-checks -----------------------------------------

// Nu longitudinal and Nt torsional modes; state [phi, psi, phi', psi'].
struct FishboneModal {
    std::size_t Nu = 0, Nt = 0;
    std::vector<double> mu_u, mu_t;
    std::vector<double> A; // Nu x Nt overlap
    HangerModel hanger;
    Eigen::VectorXd w;
    Eigen::MatrixXd E, H; // node values of e_n and eta_m
};

inline FishboneModal make_fishbone_modal(double a, std::size_t Nu, std::size_t Nt, HangerModel h)
{
    FishboneModal m;
    m.Nu = Nu;
    m.Nt = Nt;
    m.hanger = h;
    const auto spec = solve_spectrum(a, Nu);
    const auto tors = torsion_spectrum(a, Nt);
    const double ap = a * pi;
    const auto rule = gauss_rule_pieces<96>({-pi, -ap, ap, pi});
    const Eigen::Index nq = Eigen::Index(rule.x.size());
    m.w = Eigen::Map<const Eigen::VectorXd>(rule.w.data(), nq);
    m.E.resize(nq, Eigen::Index(Nu));
    m.H.resize(nq, Eigen::Index(Nt));
    for (Eigen::Index i = 0; i < nq; ++i) {
        for (std::size_t n = 0; n < Nu; ++n) m.E(i, Eigen::Index(n)) = spec[n].eval(rule.x[std::size_t(i)]);
        for (std::size_t k = 0; k < Nt; ++k) m.H(i, Eigen::Index(k)) = tors[k].eval(rule.x[std::size_t(i)]);
    }
    for (const auto& e : spec) m.mu_u.push_back(e.mu);
    for (const auto& t : tors) m.mu_t.push_back(t.mu);
    const Eigen::MatrixXd Amat = m.E.transpose() * m.w.asDiagonal() * m.H;
    m.A.assign(Amat.data(), Amat.data() + Amat.size()); // column-major Nu x Nt
    return m;
}

inline void fishbone_modal_rhs(const FishboneModal& m, const State& y, State& dy)
{
    const std::size_t Nu = m.Nu, Nt = m.Nt, D = Nu + Nt;
    Eigen::Map<const Eigen::VectorXd> phi(y.data(), Eigen::Index(Nu)), psi(y.data() + Nu, Eigen::Index(Nt));
    for (std::size_t i = 0; i < D; ++i) dy[i] = y[D + i];
    const Eigen::VectorXd u = m.E * phi, th = m.H * psi;
    const double l2 = phi.squaredNorm() + psi.squaredNorm();
    const double cross = m.w.dot((u.array() * th.array()).matrix());
    Eigen::Map<Eigen::VectorXd> au(dy.data() + D, Eigen::Index(Nu)), at(dy.data() + D + Nu, Eigen::Index(Nt));
    // projections of the nonlocal terms: int u eta_m and int theta e_n
    au = -l2 * phi - 2 * cross * (m.E.transpose() * (m.w.array() * th.array()).matrix());
    at = -l2 * psi - 2 * cross * (m.H.transpose() * (m.w.array() * u.array()).matrix());
    for (std::size_t n = 0; n < Nu; ++n) au[Eigen::Index(n)] -= m.mu_u[n] * phi[Eigen::Index(n)];
    for (std::size_t k = 0; k < Nt; ++k) at[Eigen::Index(k)] -= m.mu_t[k] * psi[Eigen::Index(k)];
    if (m.hanger.sigma > 0) {
        Eigen::VectorXd sp(u.size()), sm(u.size());
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            sp[i] = m.hanger.f(u[i] + th[i]);
            sm[i] = m.hanger.f(u[i] - th[i]);
        }
        au -= m.E.transpose() * (m.w.array() * (sp + sm).array()).matrix();
        at -= m.H.transpose() * (m.w.array() * (sp - sm).array()).matrix();
    }
}

inline double fishbone_modal_energy(const FishboneModal& m, const State& y)
{
    const std::size_t Nu = m.Nu, Nt = m.Nt, D = Nu + Nt;
    Eigen::Map<const Eigen::VectorXd> phi(y.data(), Eigen::Index(Nu)), psi(y.data() + Nu, Eigen::Index(Nt));
    const Eigen::VectorXd u = m.E * phi, th = m.H * psi;
    double E = 0;
    for (std::size_t i = 0; i < D; ++i) E += y[D + i] * y[D + i] / 2;
    for (std::size_t n = 0; n < Nu; ++n) E += m.mu_u[n] * phi[Eigen::Index(n)] * phi[Eigen::Index(n)] / 2;
    for (std::size_t k = 0; k < Nt; ++k) E += m.mu_t[k] * psi[Eigen::Index(k)] * psi[Eigen::Index(k)] / 2;
    // the two squared integrals with weight 1/8 reproduce the nonlocal forces
    const double ip = m.w.dot((u + th).array().square().matrix()), im = m.w.dot((u - th).array().square().matrix());
    E += (ip * ip + im * im) / 8;
    for (Eigen::Index i = 0; i < u.size(); ++i) E += m.w[i] * (m.hanger.F(u[i] + th[i]) + m.hanger.F(u[i] - th[i]));
    return E;
}

} // namespace pierbeam
