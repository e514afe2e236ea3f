#pragma once

#include "ode.hpp"
#include "spectral_beam.hpp"

#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/jacobi_elliptic.hpp>

#include <complex>

namespace pierbeam {

// W'' + k1 W + c3 W^3 + extra(W) = 0, W(0) = delta, W'(0) = 0, with k1 = lambda^4 + shift.
struct DuffingMode {
    double lambda = 1;
    double delta = 0;
    double c3 = 1;
    double shift = 0;
    std::function<double(double)> extra; // optional extra restoring force

    double k1() const { return std::pow(lambda, 4) + shift; }
    bool pure() const { return !extra && shift == 0; }

    double force(double w) const
    {
        double f = k1() * w + c3 * w * w * w;
        if (extra) f += extra(w);
        return f;
    }
};

struct DuffingPeriod {
    double T = 0;
    double T_half = 0;
};

// Cubic Duffing constants of W = delta cn(b t, beta).
inline std::pair<double, double> duffing_b_beta(const DuffingMode& m)
{
    const double b = std::sqrt(m.k1() + m.delta * m.delta * m.c3);
    const double beta = (m.delta / b) * std::sqrt(m.c3 / 2);
    return {b, beta};
}

inline DuffingPeriod duffing_period(const DuffingMode& m)
{
    if (!(m.lambda > 0) || m.delta < 0 || m.extra)
        throw NumericalError(ErrorCode::PreconditionViolated, "duffing_period needs lambda > 0, delta >= 0, cubic force");
    auto [b, beta] = duffing_b_beta(m);
    const double T = 4 / b * boost::math::ellint_1(beta);
    return {T, T / 2};
}

// Half period of W^2 for c3 = 1 written as a single quadrature.
inline double rigid_half_period(double lambda, double delta)
{
    const double l4 = std::pow(lambda, 4);
    return 2 * std::sqrt(2.0) * gauss<64>([&](double p) {
        const double s = std::sin(p);
        return 1 / std::sqrt(2 * l4 + delta * delta * (1 + s * s));
    }, 0, pi / 2);
}

// W and W' at time t from the Jacobi cosine.
inline std::pair<double, double> duffing_eval(const DuffingMode& m, double t)
{
    if (m.extra) throw NumericalError(ErrorCode::PreconditionViolated, "closed form needs pure cubic force");
    auto [b, beta] = duffing_b_beta(m);
    double cn = 0, dn = 0;
    const double sn = boost::math::jacobi_elliptic(beta, b * t, &cn, &dn);
    return {m.delta * cn, -m.delta * b * sn * dn};
}

inline double duffing_energy(const DuffingMode& m, double w, double wd)
{
    return wd * wd / 2 + m.k1() * w * w / 2 + m.c3 * std::pow(w, 4) / 4;
}

// xi'' + p(t) xi = 0 with p = q0 + g2 W^2 + extra(W), W driven by a DuffingMode.
struct HillProblem {
    double q0 = 1;
    double g2 = 0;
    std::function<double(double)> extra;
    DuffingMode drive;
    double sigma = pi;

    double coefficient_of(double w) const
    {
        double p = q0 + g2 * w * w;
        if (extra) p += extra(w);
        return p;
    }
};

struct MonodromyResult {
    double trace = 0;
    double det = 1;
    std::complex<double> nu1, nu2;
    double ER = 1;
    double ER_tau = 1;
    bool stable = true;
    double M[2][2]{};
};

inline double spectral_radius_from_trace(double T)
{
    const double t = std::abs(T);
    return t > 2 ? (t + std::sqrt(t * t - 4)) / 2 : 1.0;
}

inline MonodromyResult monodromy(const HillProblem& hp, double tau = 0, Tolerances tol = {1e-11, 1e-13})
{
    if (!(hp.sigma > 0)) throw NumericalError(ErrorCode::PreconditionViolated, "coefficient period must be positive");
    const DuffingMode& d = hp.drive;
    Rhs f = [&](const State& y, State& dy, double) {
        dy[0] = y[1];
        dy[1] = -d.force(y[0]);
        const double p = hp.coefficient_of(y[0]);
        dy[2] = y[3];
        dy[3] = -p * y[2];
        dy[4] = y[5];
        dy[5] = -p * y[4];
    };
    State y0{d.delta, 0, 1, 0, 0, 1};
    State y = integrate_final(f, y0, hp.sigma, tol);
    MonodromyResult r;
    r.M[0][0] = y[2];
    r.M[1][0] = y[3];
    r.M[0][1] = y[4];
    r.M[1][1] = y[5];
    r.trace = y[2] + y[5];
    r.det = y[2] * y[5] - y[4] * y[3];
    const std::complex<double> disc = std::sqrt(std::complex<double>(r.trace * r.trace - 4, 0));
    r.nu1 = (r.trace + disc) / 2.0;
    r.nu2 = (r.trace - disc) / 2.0;
    const double rho = std::max(std::abs(r.nu1), std::abs(r.nu2));
    r.stable = std::abs(r.trace) <= 2;
    r.ER = std::pow(rho, 1 / hp.sigma);
    r.ER_tau = std::pow(rho, tau / hp.sigma);
    return r;
}

// ---- Burdina criterion ------------------------------------------------------

struct BurdinaVerdict {
    bool proved_stable = false;
    int k = -1;
    double rotation = 0; // int_0^sigma sqrt(p)
    double log_ratio = 0; // log(max p / min p)
};

// Coefficient samples over one period: Jacobi cosine for pure drives, ODE otherwise.
inline std::vector<double> hill_coefficient_samples(const HillProblem& hp, std::size_t n = 4001)
{
    std::vector<double> p(n);
    if (hp.drive.pure()) {
        for (std::size_t i = 0; i < n; ++i) {
            const double t = hp.sigma * double(i) / double(n - 1);
            p[i] = hp.coefficient_of(duffing_eval(hp.drive, t).first);
        }
        return p;
    }
    const DuffingMode& d = hp.drive;
    Rhs f = [&](const State& y, State& dy, double) {
        dy[0] = y[1];
        dy[1] = -d.force(y[0]);
    };
    auto tr = integrate_dense(f, {d.delta, 0}, hp.sigma, n, {1e-12, 1e-14});
    for (std::size_t i = 0; i < n; ++i) p[i] = hp.coefficient_of(tr.y[i][0]);
    return p;
}

inline BurdinaVerdict burdina_check(const HillProblem& hp, std::size_t n = 4001)
{
    if (n % 2 == 0) ++n;
    const auto p = hill_coefficient_samples(hp, n);
    const auto [mn, mx] = std::minmax_element(p.begin(), p.end());
    if (!(*mn > 0)) throw NumericalError(ErrorCode::PreconditionViolated, "Hill coefficient must be positive");
    // composite Simpson on the uniform grid
    const double h = hp.sigma / double(n - 1);
    double s = std::sqrt(p.front()) + std::sqrt(p.back());
    for (std::size_t i = 1; i + 1 < n; ++i) s += (i % 2 ? 4.0 : 2.0) * std::sqrt(p[i]);
    BurdinaVerdict v;
    v.rotation = s * h / 3;
    v.log_ratio = std::log(*mx / *mn);
    const int k = int(std::floor(v.rotation / pi));
    const double margin = 0.5 * v.log_ratio;
    if (k * pi + margin < v.rotation && v.rotation < (k + 1) * pi - margin) {
        v.proved_stable = true;
        v.k = k;
    }
    return v;
}

// Lambda_delta: rotation integral used in the Burdina bounds of the bending variant.
inline double lambda_delta(double lambda, double delta)
{
    const double x2 = delta * delta * std::pow(lambda, 4);
    return 2 * std::sqrt(2.0) * gauss<64>([&](double th) {
        const double s2 = std::sin(th) * std::sin(th);
        return std::sqrt((1 + x2 * s2) / (2 + x2 + x2 * s2));
    }, 0, pi / 2);
}

// ---- Cazenave-Weissler intervals -------------------------------------------

enum class CWClass { StableInf, UnstableInf, Boundary };

inline const char* to_string(CWClass c)
{
    switch (c) {
    case CWClass::StableInf: return "Stable";
    case CWClass::UnstableInf: return "Unstable";
    case CWClass::Boundary: return "Boundary";
    }
    return "?";
}

inline CWClass cw_interval(double ratio, double tol = 1e-12)
{
    if (!(ratio > 0)) throw NumericalError(ErrorCode::PreconditionViolated, "ratio must be positive");
    // endpoints k(2k+1) and (k+1)(2k+1) partition (0, inf) alternately into I_S and I_U
    for (long k = 0;; ++k) {
        const double s0 = double(k * (2 * k + 1)), s1 = double((k + 1) * (2 * k + 1)), u1 = double((k + 1) * (2 * k + 3));
        if (std::abs(ratio - s1) <= tol * s1 || (k > 0 && std::abs(ratio - s0) <= tol * s0)) return CWClass::Boundary;
        if (ratio < s1) return CWClass::StableInf;
        if (std::abs(ratio - u1) <= tol * u1) return CWClass::Boundary;
        if (ratio < u1) return CWClass::UnstableInf;
    }
}

// ---- linear thresholds ------------------------------------------------------

enum class BeamVariant { SuperBending, SuperL2 };

struct LinearThreshold {
    double D = std::numeric_limits<double>::infinity();
    double E = std::numeric_limits<double>::infinity();
    BeamVariant variant = BeamVariant::SuperL2;
    double lambda = 0, rho = 0;
};

// Bending variant in scaled form: xi'' + g^2 (1 + v^2) xi = 0, v'' + v + v^3 = 0, v(0) = x.
inline HillProblem bending_hill_scaled(double gam, double x)
{
    HillProblem hp;
    hp.drive = DuffingMode{1.0, x, 1.0, 0.0, {}};
    hp.q0 = gam * gam;
    hp.g2 = gam * gam;
    hp.sigma = duffing_period(hp.drive).T_half;
    return hp;
}

// Bending variant in physical variables: xi'' + rho^4 (1 + lambda^4 W^2) xi = 0.
inline HillProblem bending_hill(double lambda, double rho, double delta)
{
    HillProblem hp;
    hp.drive = DuffingMode{lambda, delta, std::pow(lambda, 8), 0.0, {}};
    hp.q0 = std::pow(rho, 4);
    hp.g2 = std::pow(rho, 4) * std::pow(lambda, 4);
    hp.sigma = duffing_period(hp.drive).T_half;
    return hp;
}

// L2 variant: xi'' + (rho^4 + W^2) xi = 0 with W'' + lambda^4 W + W^3 = 0.
inline HillProblem l2_hill(double lambda, double rho, double delta)
{
    HillProblem hp;
    hp.drive = DuffingMode{lambda, delta, 1.0, 0.0, {}};
    hp.q0 = std::pow(rho, 4);
    hp.g2 = 1;
    hp.sigma = duffing_period(hp.drive).T_half;
    return hp;
}

struct BendingSearch {
    double x_start = 10;   // initial top of the delta*lambda^2 scan
    double x_cap = 80;     // largest top tried before declaring D infinite
    double step = 0.02;
    double rel_tol = 1e-4;
    double sliver = 0.05;  // components with max |T| - 2 below this are ignored
};

// Lower end (in delta*lambda^2) of the unstable region that persists to large amplitude.
inline double bending_critical_x(double gam, const BendingSearch& opt = {})
{
    auto excess = [gam](double x) { return std::abs(monodromy(bending_hill_scaled(gam, x)).trace) - 2; };
    double top = opt.x_start;
    while (excess(top) <= 0) {
        top *= 2;
        if (top > opt.x_cap) return std::numeric_limits<double>::infinity();
    }
    double x = top, peak = excess(top);
    for (;;) {
        const double xn = x - opt.step;
        if (xn <= 0) return 0;
        const double e = excess(xn);
        if (e <= 0) {
            if (peak < opt.sliver) return std::numeric_limits<double>::infinity();
            double lo = xn, hi = x;
            while (hi - lo > opt.rel_tol * hi) {
                const double mid = 0.5 * (lo + hi);
                (excess(mid) > 0 ? hi : lo) = mid;
            }
            return hi;
        }
        peak = std::max(peak, e);
        x = xn;
    }
}

inline LinearThreshold critical_amplitude(BeamVariant v, double lambda, double rho, const BendingSearch& opt = {})
{
    LinearThreshold t;
    t.variant = v;
    t.lambda = lambda;
    t.rho = rho;
    const double l4 = std::pow(lambda, 4), r4 = std::pow(rho, 4);
    if (v == BeamVariant::SuperL2) {
        if (rho > lambda) {
            t.D = std::sqrt(2 * (r4 - l4));
            t.E = (r4 - l4) * r4;
        }
        return t;
    }
    if (cw_interval(r4 / l4) != CWClass::UnstableInf) return t;
    const double x = bending_critical_x(rho * rho / (lambda * lambda), opt);
    if (!std::isfinite(x)) return t;
    t.D = x / (lambda * lambda);
    t.E = x * x / 2 + x * x * x * x / 4;
    return t;
}

struct LinearEnergyThreshold {
    double E = std::numeric_limits<double>::infinity();
    int j = -1, k = -1;
    double ratio = 0;
    double D = 0;
};

// Minimum of E(lambda, rho) over the couples of the given spectrum.
inline LinearEnergyThreshold linear_energy_threshold(const std::vector<BeamEigenpair>& spec, BeamVariant v, const BendingSearch& opt = {})
{
    LinearEnergyThreshold best;
    for (std::size_t i = 0; i < spec.size(); ++i)
        for (std::size_t k = i + 1; k < spec.size(); ++k) {
            auto t = critical_amplitude(v, spec[i].lambda, spec[k].lambda, opt);
            if (t.E < best.E) {
                best.E = t.E;
                best.j = spec[i].n;
                best.k = spec[k].n;
                best.ratio = spec[k].mu / spec[i].mu;
                best.D = t.D;
            }
        }
    return best;
}

} // namespace pierbeam
