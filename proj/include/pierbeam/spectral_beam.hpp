#pragma once

#include "core.hpp"

#include <algorithm>
#include <array>

namespace pierbeam {

enum class Parity { Odd, Even };
enum class Family { SmoothSin, SmoothCos, PiecewiseOdd, PiecewiseEven };

inline const char* to_string(Parity p) { return p == Parity::Odd ? "odd" : "even"; }
inline const char* to_string(Family f)
{
    switch (f) {
    case Family::SmoothSin: return "SmoothSin";
    case Family::SmoothCos: return "SmoothCos";
    case Family::PiecewiseOdd: return "PiecewiseOdd";
    case Family::PiecewiseEven: return "PiecewiseEven";
    }
    return "?";
}

// ---- characteristic equations -------------------------------------------

inline double odd_characteristic(double a, double l)
{
    return std::sin(l * pi) * std::sinh(l * a * pi) * std::sinh(l * (1 - a) * pi)
        - std::sinh(l * pi) * std::sin(l * a * pi) * std::sin(l * (1 - a) * pi);
}

inline double even_characteristic(double a, double l)
{
    return std::cos(l * pi) * std::cosh(l * a * pi) * std::sinh(l * (1 - a) * pi)
        - std::cosh(l * pi) * std::cos(l * a * pi) * std::sin(l * (1 - a) * pi);
}

// Same zero sets, divided by sinh(l*pi) resp. cosh(l*pi) so that the values
// stay O(1) for large l. Residual tolerances refer to these.
inline double odd_characteristic_scaled(double a, double l)
{
    const double r = std::sinh(l * a * pi) * std::sinh(l * (1 - a) * pi) / std::sinh(l * pi);
    return std::sin(l * pi) * r - std::sin(l * a * pi) * std::sin(l * (1 - a) * pi);
}

inline double even_characteristic_scaled(double a, double l)
{
    const double r = std::cosh(l * a * pi) * std::sinh(l * (1 - a) * pi) / std::cosh(l * pi);
    return std::cos(l * pi) * r - std::cos(l * a * pi) * std::sin(l * (1 - a) * pi);
}

// Six-term determinant for piers at -b*pi and a*pi.
inline double asymmetric_characteristic(double a, double b, double l)
{
    auto s = [l](double c) { return std::sin(l * c * pi); };
    auto sh = [l](double c) { return std::sinh(l * c * pi); };
    const double shab = sh(a + b);
    return s(2) * sh(1 - b) * sh(1 - a) * shab * shab
        - s(1 - a) * s(1 + a) * sh(1 - b) * sh(1 + b) * shab
        + s(1 - b) * s(1 - a) * s(a + b) * sh(1 + b) * sh(1 + a)
        - s(1 - b) * s(1 + b) * sh(1 - a) * sh(1 + a) * shab
        + 2 * s(1 - b) * s(1 - a) * sh(1 - b) * sh(1 - a) * shab
        - s(1 - b) * s(1 - a) * s(a + b) * sh(1 - b) * sh(1 - a);
}

// ---- clamped beam on (-pi, pi) -------------------------------------------

// g and h of the zero-counting rules, multiplied by sinh(s*pi) (same sign).
inline double g_hat(double s) { return std::sin(s * pi) - std::cos(s * pi) * std::tanh(s * pi); }
inline double h_hat(double s) { return std::sin(s * pi) + std::cos(s * pi) * std::tanh(s * pi); }

struct ClampedSpectrum {
    std::vector<double> values;

    // Lambda*_n: Lambda_n for odd n, Lambda_{n+1} for even n
    double star(std::size_t n) const { return values.at(n % 2 == 1 ? n : n + 1); }

    double psi(std::size_t n, double x) const
    {
        const double L = values.at(n);
        if (n % 2 == 0) return std::cos(L * x) / std::cos(L * pi) - std::cosh(L * x) / std::cosh(L * pi);
        return std::sin(L * x) / std::sin(L * pi) - std::sinh(L * x) / std::sinh(L * pi);
    }
};

inline ClampedSpectrum clamped_eigenvalues(std::size_t n_max)
{
    if (n_max < 1) throw NumericalError(ErrorCode::PreconditionViolated, "n_max must be >= 1");
    ClampedSpectrum cs;
    for (std::size_t n = 0; n < n_max; ++n) {
        const double k = double(n / 2);
        // tan(L pi) = -tanh(L pi) has one root in (k+1/2, k+1); tan = tanh one in (k+1, k+3/2)
        if (n % 2 == 0)
            cs.values.push_back(refine_root(h_hat, k + 0.5 + 1e-12, k + 1 - 1e-12, 1e-15));
        else
            cs.values.push_back(refine_root(g_hat, k + 1 + 1e-12, k + 1.5 - 1e-12, 1e-15));
    }
    return cs;
}

// ---- eigenpairs -----------------------------------------------------------

namespace detail {
// k-th derivative of sin(l*y) and sinh(l*y) with respect to y
inline double dsin(int k, double l, double y) { return std::pow(l, k) * std::sin(l * y + k * pi / 2); }
inline double dsinh(int k, double l, double y)
{
    return std::pow(l, k) * (k % 2 == 0 ? std::sinh(l * y) : std::cosh(l * y));
}
inline double dcos(int k, double l, double y) { return std::pow(l, k) * std::cos(l * y + k * pi / 2); }
inline double dcosh(int k, double l, double y)
{
    return std::pow(l, k) * (k % 2 == 0 ? std::cosh(l * y) : std::sinh(l * y));
}
} // namespace detail

struct BeamEigenpair {
    int n = 0;
    double a = 0.5;
    double lambda = 0;
    double mu = 0;
    Parity parity = Parity::Even;
    Family family = Family::PiecewiseEven;
    // coefficients of the unnormalized piecewise form on [0, a pi] and [a pi, pi]
    double c_center = 0; // multiplies sinh(l x)/sinh(l a pi) or cosh(l x)/cosh(l a pi)
    double c_side = 0;   // global factor on [a pi, pi]
    double c_side_h = 0; // multiplies the hyperbolic term on [a pi, pi]
    double scale = 1;    // L2 normalization, including the sign convention
    double upsilon = 0;

    // k-th derivative (k <= 4) of the unnormalized form for x in [0, pi]
    double base(double x, int k) const
    {
        using namespace detail;
        const double l = lambda;
        switch (family) {
        case Family::SmoothSin: return dsin(k, l, x);
        case Family::SmoothCos: return dcos(k, l, x);
        case Family::PiecewiseOdd:
            if (x <= a * pi) return dsin(k, l, x) - c_center * dsinh(k, l, x);
            return c_side * (c_side_h * dsinh(k, l, x - pi) - dsin(k, l, x - pi));
        case Family::PiecewiseEven: {
            if (x <= a * pi) return dcos(k, l, x) - c_center * dcosh(k, l, x);
            const double sg = (k % 2 == 0) ? 1.0 : -1.0; // d/dx f(pi - x)
            return c_side * sg * (dsin(k, l, pi - x) - c_side_h * dsinh(k, l, pi - x));
        }
        }
        return 0;
    }

    // Normalized eigenfunction (or its k-th derivative) on [-pi, pi].
    double eval(double x, int k = 0) const
    {
        if (x >= 0) return scale * base(x, k);
        const double v = scale * base(-x, k);
        // odd: e^(k)(-x) = (-1)^(k+1) e^(k)(x); even: (-1)^k
        const bool flip = (parity == Parity::Odd) ? (k % 2 == 0) : (k % 2 == 1);
        return flip ? -v : v;
    }

    // Derivative limits from the two sides of the pier a*pi (k <= 4).
    double eval_left_of_pier(int k) const { return scale * base(a * pi, k); }
    double eval_right_of_pier(int k) const
    {
        if (family == Family::SmoothSin || family == Family::SmoothCos) return scale * base(a * pi, k);
        using namespace detail;
        const double l = lambda, x = a * pi;
        if (family == Family::PiecewiseOdd) return scale * c_side * (c_side_h * dsinh(k, l, x - pi) - dsin(k, l, x - pi));
        const double sg = (k % 2 == 0) ? 1.0 : -1.0;
        return scale * c_side * sg * (dsin(k, l, pi - x) - c_side_h * dsinh(k, l, pi - x));
    }
};

namespace detail {

inline BeamEigenpair make_pair(double a, double l, Parity par)
{
    BeamEigenpair e;
    e.a = a;
    e.parity = par;
    const double smooth_tol = 1e-9;
    if (par == Parity::Odd) {
        if (frac_dist_to_int(l) < smooth_tol && frac_dist_to_int(l * a) < smooth_tol) {
            e.family = Family::SmoothSin;
            l = std::round(l);
        } else {
            e.family = Family::PiecewiseOdd;
            e.c_center = std::sin(l * a * pi) / std::sinh(l * a * pi);
            e.c_side = std::sin(l * a * pi) / std::sin(l * (1 - a) * pi);
            e.c_side_h = std::sin(l * (1 - a) * pi) / std::sinh(l * (1 - a) * pi);
        }
    } else {
        if (frac_dist_to_int(l - 0.5) < smooth_tol && frac_dist_to_int(l * a - 0.5) < smooth_tol) {
            e.family = Family::SmoothCos;
            l = std::round(l - 0.5) + 0.5;
        } else {
            e.family = Family::PiecewiseEven;
            e.c_center = std::cos(l * a * pi) / std::cosh(l * a * pi);
            e.c_side = std::cos(l * a * pi) / std::sin(l * (1 - a) * pi);
            e.c_side_h = std::sin(l * (1 - a) * pi) / std::sinh(l * (1 - a) * pi);
        }
    }
    e.lambda = l;
    e.mu = l * l * l * l;
    e.scale = 1;

    auto sq = [&e, a](int k) {
        auto f = [&e, k](double x) { double v = e.base(x, k); return v * v; };
        return 2 * (gauss<64>(f, 0, a * pi) + gauss<64>(f, a * pi, pi));
    };
    const double n2 = sq(0);
    const double sign = (par == Parity::Even) ? (e.base(0, 0) >= 0 ? 1 : -1) : (e.base(0, 1) >= 0 ? 1 : -1);
    e.scale = sign / std::sqrt(n2);
    e.upsilon = std::sqrt(sq(1) / n2);
    return e;
}

inline std::vector<std::pair<double, Parity>> scan_roots(double a, double lo, double hi, double step)
{
    std::vector<std::pair<double, Parity>> roots;
    auto scan = [&](auto f, Parity par) {
        double x0 = lo, f0 = f(a, x0);
        const long n = long(std::ceil((hi - lo) / step));
        for (long i = 1; i <= n; ++i) {
            const double x1 = lo + double(i) * step;
            const double f1 = f(a, x1);
            if (f0 == 0) {
                roots.emplace_back(x0, par);
            } else if ((f0 > 0) != (f1 > 0) && f1 != 0) {
                roots.emplace_back(refine_root([&](double l) { return f(a, l); }, x0, x1, 1e-15), par);
            }
            x0 = x1;
            f0 = f1;
        }
    };
    scan(odd_characteristic_scaled, Parity::Odd);
    scan(even_characteristic_scaled, Parity::Even);
    std::sort(roots.begin(), roots.end());
    return roots;
}

} // namespace detail

inline BeamEigenpair make_eigenpair(double a, double lambda, Parity parity) { return detail::make_pair(a, lambda, parity); }

// First n_max eigenpairs of the symmetric problem (b = a).
inline std::vector<BeamEigenpair> solve_spectrum(double a, std::size_t n_max, double step = 1e-3)
{
    PierConfig(a, a).validate();
    if (n_max < 1) throw NumericalError(ErrorCode::PreconditionViolated, "n_max must be >= 1");
    double ceiling = double(n_max) + 4;
    auto roots = detail::scan_roots(a, 0.5, ceiling, step);
    // raise the ceiling a few times before giving up
    for (int k = 0; k < 3 && roots.size() < n_max; ++k) {
        ceiling *= 2;
        roots = detail::scan_roots(a, 0.5, ceiling, step);
    }
    auto alternates = [&]() {
        for (std::size_t i = 1; i < std::min(roots.size(), n_max); ++i)
            if (roots[i].second == roots[i - 1].second) return false;
        return true;
    };
    if (roots.size() >= n_max && !alternates()) roots = detail::scan_roots(a, 0.5, ceiling, step / 16);
    if (roots.size() < n_max)
        throw NumericalError(ErrorCode::BracketOverflow, "fewer roots than requested below the scan ceiling");
    if (!alternates())
        throw NumericalError(ErrorCode::BracketOverflow, "parities do not alternate; roots merged by the scan");
    std::vector<BeamEigenpair> out;
    for (std::size_t i = 0; i < n_max; ++i) {
        out.push_back(detail::make_pair(a, roots[i].first, roots[i].second));
        out.back().n = int(i);
    }
    return out;
}

inline double eigenfunction_eval(const BeamEigenpair& e, double x, int deriv = 0) { return e.eval(x, deriv); }

inline double upsilon(const BeamEigenpair& e) { return e.upsilon; }

// Residual of the characteristic equation matching the pair's parity (scaled form).
inline double characteristic_residual(const BeamEigenpair& e)
{
    return e.parity == Parity::Odd ? odd_characteristic_scaled(e.a, e.lambda) : even_characteristic_scaled(e.a, e.lambda);
}

// ---- nodal structure --------------------------------------------------------

struct NodalRecord {
    int left = 0;
    int center = 0;
    int right = 0;
    bool double_zero = false;
    int effective = 0;
    std::vector<double> locations; // zeros inside the open spans, increasing
};

// Zero counts from the rules in the rescaled variables Lambda = lambda a,
// alpha = 1/a, so Lambda (alpha - 1) = lambda (1 - a).
inline NodalRecord count_zeros(const BeamEigenpair& e, double degenerate_tol = 1e-10)
{
    const double L = e.lambda * e.a;
    const double S = e.lambda * (1 - e.a);
    auto ipart = [](double v) { return v < 0 ? 0 : int(std::floor(v)); };
    NodalRecord r;
    auto pick = [](int k, double sign_test, int low, int high) {
        // odd k: low if test < 0; even k: low if test > 0
        const bool neg = sign_test < 0;
        return (k % 2 == 1) == neg ? low : high;
    };
    bool degenerate = false;
    if (e.parity == Parity::Odd) {
        const int ko = ipart(L - 0.5);
        const double gv = g_hat(L);
        if (std::abs(gv) < degenerate_tol) degenerate = true;
        r.center = degenerate ? 2 * ko + 1 : pick(ko, gv, 2 * ko + 1, 2 * ko + 3);
    } else {
        const int ke = ipart(L);
        const double hv = h_hat(L);
        if (std::abs(hv) < degenerate_tol) degenerate = true;
        r.center = degenerate ? 2 * ke : pick(ke, hv, 2 * ke, 2 * ke + 2);
    }
    const int rr = ipart(S - 0.5);
    const double gs = g_hat(S);
    if (std::abs(gs) < degenerate_tol) degenerate = true;
    r.left = r.right = degenerate ? rr : pick(rr, gs, rr, rr + 1);
    r.double_zero = degenerate;
    r.effective = r.left + r.center + r.right + (degenerate ? 2 : 0);

    // locations by dense sign-change search refined by TOMS 748
    const std::array<std::pair<double, double>, 3> spans{{{-pi, -e.a * pi}, {-e.a * pi, e.a * pi}, {e.a * pi, pi}}};
    for (auto [lo, hi] : spans) {
        const int m = 2000;
        const double h = (hi - lo) / m;
        double x0 = lo + 1e-9 * (hi - lo), f0 = e.eval(x0);
        for (int i = 1; i <= m; ++i) {
            double x1 = (i == m) ? hi - 1e-9 * (hi - lo) : lo + i * h;
            double f1 = e.eval(x1);
            if ((f0 > 0) != (f1 > 0)) r.locations.push_back(refine_root([&](double x) { return e.eval(x); }, x0, x1));
            x0 = x1;
            f0 = f1;
        }
    }
    return r;
}

// Pier position a at which branch n has a double zero at the piers with the
// central piece equal to the clamped mode k, i.e. lambda_n(a) a = Lambda_k.
inline std::pair<double, double> pier_double_zero(std::size_t n, std::size_t k, double lo = 0.05, double hi = 0.95)
{
    const double Lk = clamped_eigenvalues(k + 1).values[k];
    auto f = [&](double a) { return solve_spectrum(a, n + 1)[n].lambda * a - Lk; };
    const double a = refine_root(f, lo, hi, 1e-13);
    return {a, solve_spectrum(a, n + 1)[n].lambda};
}

} // namespace pierbeam
