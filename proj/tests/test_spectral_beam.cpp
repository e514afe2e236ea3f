#include <doctest.h>

#include "pierbeam/spectral_beam.hpp"

#include <mpfr.h>

#include <array>

using namespace pierbeam;

namespace {

// 256-bit evaluation of the unscaled characteristic functions.
class Mp {
public:
    Mp() { mpfr_init2(v, 256); }
    Mp(const Mp&) = delete;
    ~Mp() { mpfr_clear(v); }
    mpfr_t v;
};

double mp_characteristic(double a_d, double l_d, bool odd)
{
    Mp l, a, p, t1, t2, t3, lhs, rhs, x;
    mpfr_const_pi(p.v, MPFR_RNDN);
    mpfr_set_d(l.v, l_d, MPFR_RNDN);
    mpfr_set_d(a.v, a_d, MPFR_RNDN);
    // x = l*pi, then l*a*pi and l*(1-a)*pi
    Mp lp, lap, lbp;
    mpfr_mul(lp.v, l.v, p.v, MPFR_RNDN);
    mpfr_mul(lap.v, lp.v, a.v, MPFR_RNDN);
    mpfr_sub(lbp.v, lp.v, lap.v, MPFR_RNDN);
    if (odd) {
        mpfr_sin(t1.v, lp.v, MPFR_RNDN);
        mpfr_sinh(t2.v, lap.v, MPFR_RNDN);
        mpfr_sinh(t3.v, lbp.v, MPFR_RNDN);
        mpfr_mul(lhs.v, t1.v, t2.v, MPFR_RNDN);
        mpfr_mul(lhs.v, lhs.v, t3.v, MPFR_RNDN);
        mpfr_sinh(t1.v, lp.v, MPFR_RNDN);
        mpfr_sin(t2.v, lap.v, MPFR_RNDN);
        mpfr_sin(t3.v, lbp.v, MPFR_RNDN);
    } else {
        mpfr_cos(t1.v, lp.v, MPFR_RNDN);
        mpfr_cosh(t2.v, lap.v, MPFR_RNDN);
        mpfr_sinh(t3.v, lbp.v, MPFR_RNDN);
        mpfr_mul(lhs.v, t1.v, t2.v, MPFR_RNDN);
        mpfr_mul(lhs.v, lhs.v, t3.v, MPFR_RNDN);
        mpfr_cosh(t1.v, lp.v, MPFR_RNDN);
        mpfr_cos(t2.v, lap.v, MPFR_RNDN);
        mpfr_sin(t3.v, lbp.v, MPFR_RNDN);
    }
    mpfr_mul(rhs.v, t1.v, t2.v, MPFR_RNDN);
    mpfr_mul(rhs.v, rhs.v, t3.v, MPFR_RNDN);
    mpfr_sub(x.v, lhs.v, rhs.v, MPFR_RNDN);
    return mpfr_get_d(x.v, MPFR_RNDN);
}

// Root of the high-precision characteristic closest to guess, by bisection on a small bracket.
double mp_root(double a, double guess, bool odd)
{
    double lo = guess - 1e-7, hi = guess + 1e-7;
    double flo = mp_characteristic(a, lo, odd);
    REQUIRE((flo > 0) != (mp_characteristic(a, hi, odd) > 0));
    for (int i = 0; i < 80 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = mp_characteristic(a, mid, odd);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double l2_inner(const BeamEigenpair& e, const BeamEigenpair& f, int k = 0)
{
    const double ap = e.a * pi;
    auto g = [&](double x) { return e.eval(x, k) * f.eval(x, k); };
    return gauss<64>(g, -pi, -ap) + gauss<64>(g, -ap, ap) + gauss<64>(g, ap, pi);
}

} // namespace

TEST_CASE("eigenvalues agree with a high-precision root of the characteristic equation")
{
    for (double a : {0.2, 14.0 / 25, 0.8}) {
        const auto spec = solve_spectrum(a, 12);
        for (const auto& e : spec) {
            const double ref = mp_root(a, e.lambda, e.parity == Parity::Odd);
            CHECK(e.lambda == doctest::Approx(ref).epsilon(1e-12));
        }
    }
}

TEST_CASE("table of the first twelve eigenvalues")
{
    const std::array<double, 12> t1456{1.74, 13.8, 35.5, 47.3, 84, 205, 409, 533, 633, 1004, 1684, 2347};
    const std::array<double, 12> t12{2.44, 16, 25.6, 39, 112, 256, 326, 410, 760, 1296, 1526, 1785};
    const auto s1 = solve_spectrum(14.0 / 25, 12), s2 = solve_spectrum(0.5, 12);
    for (std::size_t n = 0; n < 12; ++n) {
        CHECK(s1[n].mu == doctest::Approx(t1456[n]).epsilon(0.01));
        CHECK(s2[n].mu == doctest::Approx(t12[n]).epsilon(0.01));
    }
}

TEST_CASE("symmetric piers at one half: smooth family and near-integer pattern")
{
    const auto spec = solve_spectrum(0.5, 12);
    int smooth = 0;
    for (const auto& e : spec) {
        if (std::abs(e.lambda - std::round(e.lambda)) < 1e-9 && int(std::round(e.lambda)) % 2 == 0) {
            ++smooth;
            CHECK(std::abs(characteristic_residual(e)) < 1e-10);
            continue;
        }
        if (e.lambda < 2) continue;
        // odd branches sit near 2k + 1/2, even ones near k + 1/4
        const double target = e.parity == Parity::Odd ? 2 * std::floor(e.lambda / 2) + 0.5 : std::floor(e.lambda) + 0.25;
        CHECK(std::abs(e.lambda - target) < 5e-3);
    }
    CHECK(smooth == 3);
}

TEST_CASE("eigenfunctions are orthonormal and satisfy the constraints")
{
    for (double a : {0.3, 0.5, 0.75}) {
        const auto spec = solve_spectrum(a, 8);
        for (std::size_t i = 0; i < spec.size(); ++i) {
            const auto& e = spec[i];
            for (std::size_t j = i; j < spec.size(); ++j) CHECK(l2_inner(e, spec[j]) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9).scale(1));
            CHECK(std::abs(e.eval(pi)) < 1e-9);
            CHECK(std::abs(e.eval(-pi)) < 1e-9);
            CHECK(std::abs(e.eval(pi, 2)) < 1e-7 * e.mu);
            CHECK(std::abs(e.eval(a * pi)) < 1e-9);
            CHECK(std::abs(e.eval(-a * pi)) < 1e-9);
            // C^2 across the pier
            const double h = 1e-9;
            CHECK(e.eval(a * pi - h, 1) == doctest::Approx(e.eval(a * pi + h, 1)).epsilon(1e-6));
            CHECK(e.eval(a * pi - h, 2) == doctest::Approx(e.eval(a * pi + h, 2)).epsilon(1e-6).scale(e.mu));
            const double parity = e.parity == Parity::Even ? 1 : -1;
            CHECK(e.eval(-1.1) == doctest::Approx(parity * e.eval(1.1)).epsilon(1e-12));
            // e'''' = lambda^4 e inside a span
            CHECK(e.eval(0.3 * a * pi, 4) == doctest::Approx(e.mu * e.eval(0.3 * a * pi)).epsilon(1e-8).scale(e.mu));
            // Upsilon^2 = int e'^2
            CHECK(e.upsilon * e.upsilon == doctest::Approx(l2_inner(e, e, 1)).epsilon(1e-8));
        }
    }
}

TEST_CASE("clamped eigenvalues against high-precision roots of tan = -tanh and tan = tanh")
{
    const auto cs = clamped_eigenvalues(6);
    for (std::size_t n = 0; n < cs.values.size(); ++n) {
        const double L = cs.values[n];
        // sin(L pi) cosh(L pi) +- cos(L pi) sinh(L pi) = 0, evaluated at 256 bits
        auto f = [n](double l) {
            Mp x, s, c, sh, ch, t1, t2, p;
            mpfr_const_pi(p.v, MPFR_RNDN);
            mpfr_set_d(x.v, l, MPFR_RNDN);
            mpfr_mul(x.v, x.v, p.v, MPFR_RNDN);
            mpfr_sin(s.v, x.v, MPFR_RNDN);
            mpfr_cos(c.v, x.v, MPFR_RNDN);
            mpfr_sinh(sh.v, x.v, MPFR_RNDN);
            mpfr_cosh(ch.v, x.v, MPFR_RNDN);
            mpfr_mul(t1.v, s.v, ch.v, MPFR_RNDN);
            mpfr_mul(t2.v, c.v, sh.v, MPFR_RNDN);
            if (n % 2 == 0) mpfr_add(t1.v, t1.v, t2.v, MPFR_RNDN);
            else mpfr_sub(t1.v, t1.v, t2.v, MPFR_RNDN);
            return mpfr_get_d(t1.v, MPFR_RNDN);
        };
        CHECK((f(L - 1e-12) > 0) != (f(L + 1e-12) > 0));
    }
}

TEST_CASE("nodal count equals the index across the pier grid")
{
    for (int i = 1; i <= 9; ++i) {
        const double a = i / 10.0;
        const auto spec = solve_spectrum(a, 12);
        for (const auto& e : spec) {
            const auto z = count_zeros(e);
            CHECK(z.effective == e.n);
            if (!z.double_zero) CHECK(int(z.locations.size()) == z.left + z.center + z.right);
        }
    }
}

TEST_CASE("positive third eigenfunction at the double-zero pier position")
{
    const auto [a, l] = pier_double_zero(2, 0);
    CHECK(a == doctest::Approx(0.3759).epsilon(1e-3 / 0.3759));
    CHECK(l == doctest::Approx(2.00269).epsilon(1e-3 / 2.00269));
    const auto e = solve_spectrum(a, 3)[2];
    // no sign change away from the piers
    int neg = 0, pos = 0;
    for (int i = 1; i < 400; ++i) {
        const double v = e.eval(-pi + 2 * pi * i / 400.0);
        if (v < -1e-8) ++neg;
        if (v > 1e-8) ++pos;
    }
    CHECK((neg == 0 || pos == 0));
}

TEST_CASE("asymmetric determinant reproduces the symmetric spectrum when b = a")
{
    const auto spec = solve_spectrum(0.4, 6);
    for (const auto& e : spec) {
        const double scale = std::pow(std::sinh(e.lambda * pi), 3);
        CHECK(std::abs(asymmetric_characteristic(0.4, 0.4, e.lambda)) / scale < 1e-9);
    }
    CHECK(std::abs(asymmetric_characteristic(0.4, 0.4, 1.7)) / std::pow(std::sinh(1.7 * pi), 3) > 1e-6);
}

TEST_CASE("errors")
{
    CHECK_THROWS_AS(clamped_eigenvalues(0), NumericalError);
    CHECK_THROWS_AS(PierConfig(1.2, 0.5), NumericalError);
}
