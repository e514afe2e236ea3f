#pragma once

#include "spectral_beam.hpp"

#include <map>
#include <tuple>

namespace pierbeam {

// D, P live on the central span; Ds, Ps on the side spans.
enum class TorsionFamily { D, P, Ds, Ps };

inline const char* to_string(TorsionFamily f)
{
    switch (f) {
    case TorsionFamily::D: return "D";
    case TorsionFamily::P: return "P";
    case TorsionFamily::Ds: return "Dside";
    case TorsionFamily::Ps: return "Pside";
    }
    return "?";
}

struct TorsionEigenpair {
    int rank = 0;
    double a = 0.5;
    double kappa = 0;
    double mu = 0;
    TorsionFamily family = TorsionFamily::P;
    int multiplicity = 1;
    double scale = 1;

    Parity parity() const
    {
        return (family == TorsionFamily::D || family == TorsionFamily::Ds) ? Parity::Odd : Parity::Even;
    }

    double eval(double x, int k = 0) const
    {
        using namespace detail;
        const double ap = a * pi;
        switch (family) {
        case TorsionFamily::D: return (std::abs(x) < ap) ? scale * dsin(k, kappa, x) : 0.0;
        case TorsionFamily::P: return (std::abs(x) < ap) ? scale * dcos(k, kappa, x) : 0.0;
        case TorsionFamily::Ds:
            if (x <= -ap) return scale * dsin(k, kappa, x + pi);
            if (x >= ap) return scale * dsin(k, kappa, x - pi);
            return 0.0;
        case TorsionFamily::Ps:
            if (x <= -ap) return scale * dsin(k, kappa, x + pi);
            if (x >= ap) return ((k % 2 == 0) ? 1.0 : -1.0) * scale * dsin(k, kappa, pi - x);
            return 0.0;
        }
        return 0.0;
    }
};

namespace detail {

// kappa as an exact rational num/den (den > 0) for coincidence detection
struct RationalKappa {
    std::int64_t num, den;
    bool operator<(const RationalKappa& o) const { return num * o.den < o.num * den; }
    bool operator==(const RationalKappa& o) const { return num * o.den == o.num * den; }
};

struct Candidate {
    double kappa;
    TorsionFamily family;
    std::optional<RationalKappa> exact;
};

inline int family_order(TorsionFamily f)
{
    switch (f) {
    case TorsionFamily::D:
    case TorsionFamily::P: return 0;
    case TorsionFamily::Ds: return 1;
    case TorsionFamily::Ps: return 2;
    }
    return 3;
}

} // namespace detail

inline std::vector<TorsionEigenpair> torsion_spectrum(const PierConfig& cfg, std::size_t n_max, double merge_window = 1e-9)
{
    using detail::Candidate;
    const double a = cfg.a;
    std::vector<Candidate> cand;
    // enough terms of each progression to cover n_max entries
    const int terms = int(n_max) + 2;
    for (int n = 1; n <= terms; ++n) cand.push_back({n / a, TorsionFamily::D, std::nullopt});
    for (int n = 0; n < terms; ++n) cand.push_back({(2 * n + 1) / (2 * a), TorsionFamily::P, std::nullopt});
    for (int n = 1; n <= terms; ++n) {
        cand.push_back({n / (1 - a), TorsionFamily::Ds, std::nullopt});
        cand.push_back({n / (1 - a), TorsionFamily::Ps, std::nullopt});
    }
    if (cfg.a_exact) {
        const auto p = cfg.a_exact->num, q = cfg.a_exact->den;
        int iD = 1, iP = 0, iS = 1;
        for (auto& c : cand) {
            switch (c.family) {
            case TorsionFamily::D: c.exact = detail::RationalKappa{iD++ * q, p}; break;
            case TorsionFamily::P: c.exact = detail::RationalKappa{(2 * iP++ + 1) * q, 2 * p}; break;
            case TorsionFamily::Ds: c.exact = detail::RationalKappa{iS * q, q - p}; break;
            case TorsionFamily::Ps: c.exact = detail::RationalKappa{iS++ * q, q - p}; break;
            }
        }
    }
    auto same = [&](const Candidate& x, const Candidate& y) {
        if (x.exact && y.exact) return *x.exact == *y.exact;
        return std::abs(x.kappa - y.kappa) <= merge_window * std::max(1.0, x.kappa);
    };
    std::stable_sort(cand.begin(), cand.end(), [&](const Candidate& x, const Candidate& y) {
        if (!same(x, y)) return (x.exact && y.exact) ? *x.exact < *y.exact : x.kappa < y.kappa;
        return detail::family_order(x.family) < detail::family_order(y.family);
    });

    std::vector<TorsionEigenpair> out;
    std::size_t i = 0;
    while (i < cand.size() && out.size() < n_max) {
        std::size_t j = i + 1;
        while (j < cand.size() && same(cand[i], cand[j])) ++j;
        const int mult = int(j - i);
        for (std::size_t k = i; k < j && out.size() < n_max; ++k) {
            TorsionEigenpair t;
            t.rank = int(out.size());
            t.a = a;
            t.kappa = cand[i].exact ? double(cand[i].exact->num) / double(cand[i].exact->den) : cand[k].kappa;
            t.mu = t.kappa * t.kappa;
            t.family = cand[k].family;
            t.multiplicity = mult;
            const bool central = t.family == TorsionFamily::D || t.family == TorsionFamily::P;
            t.scale = 1.0 / std::sqrt((central ? a : 1 - a) * pi);
            out.push_back(t);
        }
        i = j;
    }
    return out;
}

inline std::vector<TorsionEigenpair> torsion_spectrum(double a, std::size_t n_max)
{
    return torsion_spectrum(PierConfig(a, a), n_max);
}

inline double torsion_eigenfunction_eval(const TorsionEigenpair& t, double x, int k = 0) { return t.eval(x, k); }

// L2 norm squared of a torsional eigenfunction by per-span quadrature
inline double torsion_norm2(const TorsionEigenpair& t)
{
    const double a = t.a;
    auto f = [&t](double x) { double v = t.eval(x); return v * v; };
    return gauss<64>(f, -pi, -a * pi) + gauss<64>(f, -a * pi, a * pi) + gauss<64>(f, a * pi, pi);
}

struct CouplingCoefficient {
    double value = 0;
    int beam_index = 0;
    int torsion_rank = 0;
};

inline CouplingCoefficient coupling_coefficient(const BeamEigenpair& e, const TorsionEigenpair& t)
{
    if (std::abs(e.a - t.a) > 1e-14)
        throw NumericalError(ErrorCode::PreconditionViolated, "pairs computed at different pier positions");
    const double a = e.a;
    auto f = [&](double x) { return e.eval(x) * t.eval(x); };
    CouplingCoefficient c;
    c.value = gauss<96>(f, -pi, -a * pi) + gauss<96>(f, -a * pi, a * pi) + gauss<96>(f, a * pi, pi);
    c.beam_index = e.n;
    c.torsion_rank = t.rank;
    return c;
}

} // namespace pierbeam
