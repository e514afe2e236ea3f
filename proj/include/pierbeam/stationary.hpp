#pragma once

#include "core.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>

namespace pierbeam {

struct Load {
    enum class Tag { Constant, Sinusoid, Custom };
    std::function<double(double)> f;
    Tag tag = Tag::Custom;
    double c = 0; // constant value or sinusoid amplitude
    double m = 0; // sinusoid wavenumber

    static Load constant(double c)
    {
        return {[c](double) { return c; }, Tag::Constant, c, 0};
    }
    // c * sin(m x)
    static Load sinusoid(double c, double m)
    {
        return {[c, m](double x) { return c * std::sin(m * x); }, Tag::Sinusoid, c, m};
    }
    static Load custom(std::function<double(double)> f) { return {std::move(f), Tag::Custom, 0, 0}; }

    double operator()(double x) const { return f(x); }
};

namespace detail {

// Kernel of w'''' + gamma w: monomials for gamma = 0, products of
// trigonometric and hyperbolic functions of nu x for gamma = 4 nu^4.
struct Kernel {
    double nu = 0;

    // k-th derivative of the i-th basis function
    double d(int i, int k, double x) const
    {
        if (nu == 0) {
            // x^i
            if (k > i) return 0;
            double c = 1;
            for (int j = 0; j < k; ++j) c *= double(i - j);
            return c * std::pow(x, i - k);
        }
        // cosh(z x), sinh(z x) with z = (1+i) nu hold all four products
        const std::complex<double> z(nu, nu);
        std::complex<double> zk = std::pow(z, k);
        const std::complex<double> zx = z * x;
        const bool even_k = k % 2 == 0;
        const std::complex<double> ch = zk * (even_k ? std::cosh(zx) : std::sinh(zx));
        const std::complex<double> sh = zk * (even_k ? std::sinh(zx) : std::cosh(zx));
        switch (i) {
        case 0: return ch.real(); // cos cosh
        case 1: return sh.real(); // cos sinh ... real part of sinh(zx) is sinh cos
        case 2: return sh.imag(); // sin cosh
        case 3: return ch.imag(); // sin sinh
        }
        return 0;
    }

    // impulse response: G(0)=G'(0)=G''(0)=0, G'''(0)=1
    double green(int k, double t) const
    {
        if (nu == 0) {
            switch (k) {
            case 0: return t * t * t / 6;
            case 1: return t * t / 2;
            case 2: return t;
            case 3: return 1;
            default: return 0;
            }
        }
        // G = (sin cosh - cos sinh)/(4 nu^3) = (Im cosh(zx) ... ) expressed through the basis
        return (d(2, k, t) - d(1, k, t)) / (4 * nu * nu * nu);
    }
};

} // namespace detail

class StationarySolution {
public:
    PierConfig cfg;
    double gamma = 0;
    Load load;
    double alpha_f = 0;
    double beta_f = 0;
    double condition = 0;
    std::array<double, 4> uf_coef{};                // kernel combination in U_f
    std::array<std::array<double, 4>, 3> corr{};    // P_b, P_0, P_a in kernel basis

    // span index: 0 left, 1 center, 2 right
    int span(double x) const
    {
        if (x < cfg.left_pier()) return 0;
        if (x < cfg.right_pier()) return 1;
        return 2;
    }

    // k-th derivative of the particular solution int_{-pi}^x G(x-s) f(s) ds
    double particular(double x, int k) const
    {
        double s = 0;
        double lo = -pi;
        for (double br : {cfg.left_pier(), cfg.right_pier(), x}) {
            const double hi = std::min(br, x);
            if (hi > lo) {
                s += gauss<128>([&](double t) { return kernel_.green(k, x - t) * load(t); }, lo, hi);
                lo = hi;
            }
        }
        if (k == 4) s += load(x); // G'''(0) = 1 contributes f(x)
        return s;
    }

    // k-th derivative (k <= 4) of the four-point classical solution U_f
    double base(double x, int k = 0) const
    {
        double v = particular(x, k);
        for (int i = 0; i < 4; ++i) v += uf_coef[i] * kernel_.d(i, k, x);
        return v;
    }

    double correction(double x, int k, int sp) const
    {
        double v = 0;
        for (int i = 0; i < 4; ++i) v += corr[sp][i] * kernel_.d(i, k, x);
        return v;
    }

    // weak solution u = U_f + P on each span; at a pier the right-hand piece is used
    double eval(double x, int k = 0) const { return base(x, k) + correction(x, k, span(x)); }
    double eval_span(double x, int k, int sp) const { return base(x, k) + correction(x, k, sp); }

    // pointwise residual of u'''' + gamma u - f
    double residual(double x) const
    {
        const int sp = span(x);
        return eval_span(x, 4, sp) + gamma * eval_span(x, 0, sp) - load(x);
    }

    // E(v) = 1/2 int (v''^2 + gamma v^2) - int f v, for v = U_f (weak = false) or u
    double energy(bool weak) const
    {
        double e = 0;
        const std::array<double, 4> br{-pi, cfg.left_pier(), cfg.right_pier(), pi};
        for (int sp = 0; sp < 3; ++sp) {
            e += gauss<64>(
                [&](double x) {
                    const double v = weak ? eval_span(x, 0, sp) : base(x, 0);
                    const double v2 = weak ? eval_span(x, 2, sp) : base(x, 2);
                    return 0.5 * (v2 * v2 + gamma * v * v) - load(x) * v;
                },
                br[sp], br[sp + 1]);
        }
        return e;
    }

    static StationarySolution solve(const PierConfig& cfg, double gamma, const Load& f);

private:
    detail::Kernel kernel_;
};

inline StationarySolution StationarySolution::solve(const PierConfig& cfg, double gamma, const Load& f)
{
    cfg.validate();
    if (gamma < 0) throw NumericalError(ErrorCode::PreconditionViolated, "gamma must be >= 0");
    StationarySolution s;
    s.cfg = cfg;
    s.gamma = gamma;
    s.load = f;
    s.kernel_.nu = gamma == 0 ? 0.0 : std::pow(gamma / 4, 0.25);
    const auto& K = s.kernel_;
    const double xb = cfg.left_pier(), xa = cfg.right_pier();
    const std::array<double, 4> pts{-pi, xb, xa, pi};

    auto check = [](const Eigen::MatrixXd& M) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
        const auto& sv = svd.singularValues();
        const double c = sv(0) / sv(sv.size() - 1);
        if (!(c < 1e12)) throw NumericalError(ErrorCode::SingularSystem, "matching system is numerically singular");
        return c;
    };

    // U_f: particular solution plus kernel terms vanishing at the four points
    {
        Eigen::Matrix4d M;
        Eigen::Vector4d rhs;
        for (int r = 0; r < 4; ++r) {
            for (int i = 0; i < 4; ++i) M(r, i) = K.d(i, 0, pts[r]);
            rhs(r) = -s.particular(pts[r], 0);
        }
        check(M);
        Eigen::Vector4d c = M.fullPivLu().solve(rhs);
        for (int i = 0; i < 4; ++i) s.uf_coef[i] = c(i);
    }
    const double fb = -s.base(-pi, 2);
    const double fa = -s.base(pi, 2);

    if (gamma == 0) {
        // P = q(x) (A x + B pi) with q vanishing at the span ends
        struct Quad { double q1, q0; };
        auto make_q = [](double l, double r) { return Quad{-(l + r), l * r}; };
        const std::array<Quad, 3> q{make_q(-pi, xb), make_q(xb, xa), make_q(xa, pi)};
        // value of d^k/dx^k [q(x)(A x + B pi)] split into A- and B-parts
        auto part = [](const Quad& qq, int k, double x, bool isA) {
            const double qv = x * x + qq.q1 * x + qq.q0, qd = 2 * x + qq.q1, qdd = 2;
            if (isA) {
                if (k == 0) return qv * x;
                if (k == 1) return qd * x + qv;
                if (k == 2) return qdd * x + 2 * qd;
                return 3 * qdd;
            }
            const double p = pi;
            if (k == 0) return qv * p;
            if (k == 1) return qd * p;
            if (k == 2) return qdd * p;
            return 0.0;
        };
        Eigen::Matrix<double, 6, 6> M = Eigen::Matrix<double, 6, 6>::Zero();
        Eigen::Matrix<double, 6, 1> rhs = Eigen::Matrix<double, 6, 1>::Zero();
        // unknowns (A,B) span 0, (C,D) span 1, (E,F) span 2
        int row = 0;
        for (int k = 1; k <= 2; ++k) {
            M(row, 0) = part(q[0], k, xb, true);
            M(row, 1) = part(q[0], k, xb, false);
            M(row, 2) = -part(q[1], k, xb, true);
            M(row, 3) = -part(q[1], k, xb, false);
            ++row;
            M(row, 4) = part(q[2], k, xa, true);
            M(row, 5) = part(q[2], k, xa, false);
            M(row, 2) = -part(q[1], k, xa, true);
            M(row, 3) = -part(q[1], k, xa, false);
            ++row;
        }
        M(row, 0) = part(q[0], 2, -pi, true);
        M(row, 1) = part(q[0], 2, -pi, false);
        rhs(row++) = fb;
        M(row, 4) = part(q[2], 2, pi, true);
        M(row, 5) = part(q[2], 2, pi, false);
        rhs(row++) = fa;
        s.condition = check(M);
        Eigen::Matrix<double, 6, 1> c = M.fullPivLu().solve(rhs);
        for (int sp = 0; sp < 3; ++sp) {
            const double A = c(2 * sp), B = c(2 * sp + 1) * pi;
            // expand q(x)(A x + B) into monomials
            s.corr[sp] = {B * q[sp].q0, A * q[sp].q0 + B * q[sp].q1, A * q[sp].q1 + B, A};
        }
        s.beta_f = 6 * (c(2) - c(0));
        s.alpha_f = 6 * (c(4) - c(2));
        return s;
    }

    // gamma > 0: twelve conditions on three kernel combinations
    Eigen::Matrix<double, 12, 12> M = Eigen::Matrix<double, 12, 12>::Zero();
    Eigen::Matrix<double, 12, 1> rhs = Eigen::Matrix<double, 12, 1>::Zero();
    int row = 0;
    auto put = [&](int sp, int k, double x, double sign) {
        for (int i = 0; i < 4; ++i) M(row, 4 * sp + i) += sign * K.d(i, k, x);
    };
    const std::array<std::pair<double, double>, 3> ends{{{-pi, xb}, {xb, xa}, {xa, pi}}};
    for (int sp = 0; sp < 3; ++sp) {
        put(sp, 0, ends[sp].first, 1);
        ++row;
        put(sp, 0, ends[sp].second, 1);
        ++row;
    }
    for (int k = 1; k <= 2; ++k) {
        put(0, k, xb, 1);
        put(1, k, xb, -1);
        ++row;
        put(2, k, xa, 1);
        put(1, k, xa, -1);
        ++row;
    }
    put(0, 2, -pi, 1);
    rhs(row++) = fb;
    put(2, 2, pi, 1);
    rhs(row++) = fa;
    // column scaling keeps the growth of cosh(nu x) out of the conditioning test
    Eigen::Matrix<double, 12, 1> colscale;
    for (int j = 0; j < 12; ++j) colscale(j) = 1.0 / M.col(j).cwiseAbs().maxCoeff();
    Eigen::Matrix<double, 12, 12> Ms = M * colscale.asDiagonal();
    s.condition = check(Ms);
    Eigen::Matrix<double, 12, 1> c = Ms.fullPivLu().solve(rhs).cwiseProduct(colscale);
    for (int sp = 0; sp < 3; ++sp)
        for (int i = 0; i < 4; ++i) s.corr[sp][i] = c(4 * sp + i);
    s.beta_f = s.correction(xb, 3, 1) - s.correction(xb, 3, 0);
    s.alpha_f = s.correction(xa, 3, 2) - s.correction(xa, 3, 1);
    return s;
}

inline StationarySolution solve_stationary(const PierConfig& cfg, double gamma, const Load& f)
{
    return StationarySolution::solve(cfg, gamma, f);
}

inline std::pair<double, double> impulse_coefficients(const StationarySolution& s) { return {s.alpha_f, s.beta_f}; }

inline double energy_gap(const StationarySolution& s) { return s.energy(false) - s.energy(true); }

inline double energy_gap(const PierConfig& cfg, double gamma, const Load& f)
{
    return energy_gap(solve_stationary(cfg, gamma, f));
}

// Basis of the orthogonal complement of V(I): piecewise cubics.
struct OrthoComplementBasis {
    double a = 0.5, b = 0.5;

    // k-th derivative of c*(x^3 + p2 x^2 + p1 x + p0)
    static double cubic(double c, double p2, double p1, double p0, double x, int k)
    {
        switch (k) {
        case 0: return c * (((x + p2) * x + p1) * x + p0);
        case 1: return c * ((3 * x + 2 * p2) * x + p1);
        case 2: return c * (6 * x + 2 * p2);
        case 3: return c * 6;
        default: return 0;
        }
    }

    double v1(double x, int k = 0) const
    {
        const double p = pi, p2 = pi * pi, p3 = p2 * pi, q = b * b + 2 * b, r = b * b - 2 * b;
        if (x <= -b * pi) return cubic(-(b + 1), 3 * p, p2 * q, p3 * (q - 2), x, k);
        return cubic(1 - b, -3 * p, p2 * r, -p3 * (r - 2), x, k);
    }

    double v2(double x, int k = 0) const
    {
        const double p = pi, p2 = pi * pi, p3 = p2 * pi, q = a * a - 2 * a, r = a * a + 2 * a;
        if (x <= a * pi) return cubic(a - 1, 3 * p, p2 * q, p3 * (q - 2), x, k);
        return cubic(1 + a, -3 * p, p2 * r, -p3 * (r - 2), x, k);
    }
};

inline OrthoComplementBasis vperp_basis(const PierConfig& cfg) { return {cfg.a, cfg.b}; }

} // namespace pierbeam
