#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pierbeam {

inline constexpr double pi = std::numbers::pi;

enum class ErrorCode {
    BracketOverflow,
    DegenerateSign,
    SingularSystem,
    IntegrationFailure,
    PreconditionViolated,
    BudgetExceeded,
    RootNotBracketed,
    FormatError,
};

inline const char* to_string(ErrorCode c)
{
    switch (c) {
    case ErrorCode::BracketOverflow: return "BracketOverflow";
    case ErrorCode::DegenerateSign: return "DegenerateSign";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::IntegrationFailure: return "IntegrationFailure";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::RootNotBracketed: return "RootNotBracketed";
    case ErrorCode::FormatError: return "FormatError";
    }
    return "Unknown";
}

class NumericalError : public std::runtime_error {
public:
    NumericalError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exact rational p/q, used when pier positions are given as fractions.
struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;
    double value() const { return double(num) / double(den); }
};

// Pier geometry: piers at -b*pi and a*pi on I = (-pi, pi).
struct PierConfig {
    double a = 0.5;
    double b = 0.5;
    std::optional<Fraction> a_exact;

    PierConfig() = default;
    PierConfig(double a_, double b_) : a(a_), b(b_) { validate(); }
    explicit PierConfig(double a_) : PierConfig(a_, a_) {}
    explicit PierConfig(Fraction f) : a(f.value()), b(f.value()), a_exact(f) { validate(); }

    static PierConfig symmetric(double a_) { return PierConfig(a_, a_); }

    void validate() const
    {
        if (!(a > 0 && a < 1 && b > 0 && b < 1))
            throw NumericalError(ErrorCode::PreconditionViolated, "pier positions must lie in (0,1)");
    }
    bool symmetric_piers() const { return a == b; }
    double left_pier() const { return -b * pi; }
    double right_pier() const { return a * pi; }
};

// Composite Gauss-Legendre rule on [lo, hi] with N nodes.
template <unsigned N, class F>
double gauss(F&& f, double lo, double hi)
{
    return boost::math::quadrature::gauss<double, N>::integrate(std::forward<F>(f), lo, hi);
}

// Nodes and weights of an N-point rule mapped to [lo, hi].
struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
};

template <unsigned N>
QuadRule gauss_rule(double lo, double hi)
{
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& abs = G::abscissa();
    const auto& wts = G::weights();
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    QuadRule r;
    // boost stores the non-negative half of the symmetric rule
    for (std::size_t i = 0; i < abs.size(); ++i) {
        if (abs[i] == 0.0) {
            r.x.push_back(c);
            r.w.push_back(h * wts[i]);
            continue;
        }
        r.x.push_back(c - h * abs[i]);
        r.w.push_back(h * wts[i]);
        r.x.push_back(c + h * abs[i]);
        r.w.push_back(h * wts[i]);
    }
    return r;
}

template <unsigned N>
QuadRule gauss_rule_pieces(const std::vector<double>& breaks)
{
    QuadRule r;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        auto p = gauss_rule<N>(breaks[i], breaks[i + 1]);
        r.x.insert(r.x.end(), p.x.begin(), p.x.end());
        r.w.insert(r.w.end(), p.w.begin(), p.w.end());
    }
    return r;
}

// Refine a sign-changing bracket to |hi-lo| below tol (TOMS 748).
template <class F>
double refine_root(F&& f, double lo, double hi, double tol = 1e-14)
{
    double flo = f(lo), fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw NumericalError(ErrorCode::RootNotBracketed, "no sign change in bracket");
    std::uintmax_t it = 200;
    auto stop = [tol](double x, double y) { return std::abs(x - y) <= tol * std::max(1.0, std::abs(x)); };
    auto [x0, x1] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, it);
    return 0.5 * (x0 + x1);
}

inline double frac_dist_to_int(double v) { return std::abs(v - std::round(v)); }

} // namespace pierbeam
