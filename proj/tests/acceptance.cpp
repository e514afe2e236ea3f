// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.

#include "pierbeam/cli.hpp"
#include "pierbeam/pierbeam.hpp"

#include <chrono>
#include <cstdio>
#include <random>
#include <sstream>

using namespace pierbeam;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel(double x, double ref)
{
    return std::abs(x - ref) / std::abs(ref);
}

struct Verdict {
    bool ok = true;
    std::ostringstream why;

    void require(bool c, const std::string& what)
    {
        if (!c) {
            if (!ok) why << "; ";
            why << what;
            ok = false;
        }
    }
};

int failures = 0;

void report(int n, const std::string& title, Verdict& v, const std::string& detail)
{
    if (!v.ok) ++failures;
    std::printf("%s criterion %d: %s | %s%s%s\n", v.ok ? "PASS" : "FAIL", n, title.c_str(), detail.c_str(), v.ok ? "" : " | failed: ",
                v.ok ? "" : v.why.str().c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

// 1. beam spectra against the tabulated eigenvalues
void beam_spectra()
{
    constexpr double tol = 0.01, max_seconds = 1.0;
    const std::array<double, 12> t1456{1.74, 13.8, 35.5, 47.3, 84, 205, 409, 533, 633, 1004, 1684, 2347};
    const std::array<double, 12> t12{2.44, 16, 25.6, 39, 112, 256, 326, 410, 760, 1296, 1526, 1785};
    Verdict v;
    double worst = 0, slowest = 0;
    for (auto [a, table] : {std::pair{14.0 / 25, t1456}, std::pair{0.5, t12}}) {
        const auto t0 = Clock::now();
        const auto s = solve_spectrum(a, 12);
        slowest = std::max(slowest, seconds_since(t0));
        v.require(s.size() == 12, "twelve eigenvalues");
        for (std::size_t n = 0; n < 12; ++n) worst = std::max(worst, rel(s[n].mu, table[n]));
    }
    v.require(worst <= tol, "eigenvalue outside 1%");
    v.require(slowest < max_seconds, "runtime");
    report(1, "beam spectra", v, "max rel dev " + fmt("%.4f", worst) + ", slowest " + fmt("%.3f", slowest) + " s");
}

// 2. smooth family at a = 1/2 and the near-integer pattern of the rest
void smooth_family()
{
    constexpr double res_tol = 1e-10, pattern_tol = 5e-3;
    Verdict v;
    const auto s = solve_spectrum(0.5, 12);
    std::vector<int> smooth;
    double worst_res = 0, worst_pat = 0;
    for (const auto& e : s) {
        const double k = std::round(e.lambda);
        if (std::abs(e.lambda - k) < 1e-9 && int(k) % 2 == 0) {
            smooth.push_back(int(k));
            worst_res = std::max(worst_res, std::abs(characteristic_residual(e)));
            continue;
        }
        if (e.lambda < 2) continue;
        const double target = e.parity == Parity::Odd ? 2 * std::floor(e.lambda / 2) + 0.5 : std::floor(e.lambda) + 0.25;
        worst_pat = std::max(worst_pat, std::abs(e.lambda - target));
    }
    v.require(smooth == std::vector<int>{2, 4, 6}, "smooth eigenvalues 2, 4, 6");
    v.require(worst_res < res_tol, "residual");
    v.require(worst_pat < pattern_tol, "pattern");
    report(2, "smooth family at a = 1/2", v, "residual " + fmt("%.2e", worst_res) + ", pattern dev " + fmt("%.2e", worst_pat));
}

// 3. torsional spectra and multiplicities
void torsional_spectra()
{
    constexpr double tol = 1e-4;
    Verdict v;
    const std::array<double, 10> half{1, 4, 4, 4, 9, 16, 16, 16, 25, 36};
    const auto t = torsion_spectrum(0.5, 10);
    bool exact = t.size() == 10;
    for (std::size_t i = 0; exact && i < 10; ++i) exact = std::abs(t[i].mu - half[i]) < 1e-12;
    v.require(exact, "a = 1/2 spectrum");
    const std::array<double, 10> table{0.797194, 3.18876, 5.1653, 5.1653, 7.17474, 12.7551, 19.9299, 20.6611, 20.6611, 28.6989};
    const auto u = torsion_spectrum(PierConfig(Fraction{14, 25}), 10);
    double worst = 0;
    for (std::size_t i = 0; i < 10; ++i) worst = std::max(worst, std::abs(u[i].mu - table[i]));
    v.require(worst < tol, "a = 14/25 table");
    // reported multiplicities equal the number of coinciding eigenvalues in a longer list
    for (double a : {0.5, 14.0 / 25, 0.6, 2.0 / 3}) {
        const auto longer = torsion_spectrum(a, 24);
        for (std::size_t i = 0; i < 10; ++i) {
            const int count = int(std::count_if(longer.begin(), longer.end(), [&](const TorsionEigenpair& e) { return std::abs(e.mu - longer[i].mu) < 1e-9 * longer[i].mu; }));
            v.require(longer[i].multiplicity == count, "multiplicity at a = " + fmt("%.4g", a));
        }
    }
    v.require(t[0].multiplicity == 1 && t[1].multiplicity == 3 && t[4].multiplicity == 1, "multiplicities at a = 1/2");
    v.require(torsion_spectrum(1.0 / 3, 1)[0].multiplicity == 3 && torsion_spectrum(0.4, 1)[0].multiplicity == 1, "first multiplicity");
    report(3, "torsional spectra", v, "max abs dev at 14/25 " + fmt("%.2e", worst));
}

// 4. coupling coefficients
void coupling()
{
    constexpr double tol = 0.005;
    Verdict v;
    const double A1 = std::pow(coupling_coefficient(solve_spectrum(0.5, 1)[0], torsion_spectrum(0.5, 2)[0]).value, 2);
    const double A2 = std::pow(coupling_coefficient(solve_spectrum(2.0 / 3, 2)[1], torsion_spectrum(2.0 / 3, 2)[1]).value, 2);
    v.require(std::abs(A1 - 0.953) <= tol, "A(0.5)");
    v.require(std::abs(A2 - 0.975) <= tol, "A(2/3)");
    report(4, "coupling coefficients", v, "A(0.5) = " + fmt("%.4f", A1) + ", A(2/3) = " + fmt("%.4f", A2));
}

// 5. stationary closed forms and the positive solution
void stationary()
{
    constexpr double tol = 1e-8, res_tol = 1e-10;
    Verdict v;
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
        const double a = 0.03 + 0.94 * i / 19.0;
        const double b1 = solve_stationary(PierConfig(a, a), 0, Load::constant(24)).beta_f;
        const double b2 = solve_stationary(PierConfig(a, a), 0, Load::sinusoid(81, 3)).beta_f;
        const double r1 = 3 * (1 + a) * (a * a - 5) * pi / ((1 - a) * (2 * a + 1));
        const double r2 = 3 * std::sin(3 * a * pi) / ((1 - a) * (1 - a) * a * a * std::pow(pi, 3));
        worst = std::max({worst, rel(b1, r1), std::abs(b2 - r2) / std::max(std::abs(r2), 1e-6)});
    }
    v.require(worst < tol, "impulse coefficients");
    const Load f = Load::custom([](double x) {
        return 177.0 / 16 * std::cos(x / 2) * std::cos(x) * std::cos(x) - 17 * std::cos(x) * std::sin(x) * std::sin(x / 2) -
               11 * std::cos(x / 2) * std::sin(x) * std::sin(x);
    });
    const auto s = solve_stationary(PierConfig(0.5, 0.5), 0, f);
    double res = 0, zero = 0;
    for (int i = 1; i < 200; ++i) res = std::max(res, std::abs(s.residual(-pi + 2 * pi * i / 200.0 + 1e-4)));
    for (double x : {-pi, -pi / 2, pi / 2, pi}) zero = std::max(zero, std::abs(s.eval(x)));
    v.require(res < res_tol, "ODE residual");
    v.require(zero < 1e-14, "zeros");
    report(5, "stationary closed forms", v, "max rel dev " + fmt("%.2e", worst) + ", residual " + fmt("%.2e", res) + ", zeros " + fmt("%.1e", zero));
}

// 6. nodal count and the positive third eigenfunction
void nodal()
{
    constexpr double tol = 1e-3;
    Verdict v;
    int bad = 0;
    for (int i = 1; i <= 9; ++i)
        for (const auto& e : solve_spectrum(i / 10.0, 12))
            if (count_zeros(e).effective != e.n) ++bad;
    v.require(bad == 0, "nodal count");
    const auto [a, l] = pier_double_zero(2, 0);
    v.require(std::abs(a - 0.3759) <= tol, "pier position");
    v.require(std::abs(l - 2.00269) <= tol, "eigenvalue");
    report(6, "nodal theorem", v, std::to_string(bad) + " mismatches, a = " + fmt("%.5f", a) + ", lambda = " + fmt("%.5f", l));
}

// 7. Floquet core
void floquet()
{
    constexpr double det_tol = 1e-8, trace_tol = 1e-9, bracket = 1e-3;
    Verdict v;
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> U(0, 1);
    double worst_det = 0;
    for (int i = 0; i < 500; ++i) {
        const double l = 0.5 + 2 * U(rng), rho = 0.5 + 2.5 * U(rng), d = 3 * U(rng);
        const auto hp = i % 2 ? l2_hill(l, rho, d) : bending_hill(l, rho, 0.5 * d / (l * l));
        worst_det = std::max(worst_det, std::abs(monodromy(hp).det - 1));
    }
    v.require(worst_det < det_tol, "determinant");
    double worst_tr = 0;
    for (double q0 : {0.3, 2.3, 9.1})
        for (double s : {0.4, 1.7, 3.0}) {
            HillProblem hp;
            hp.q0 = q0;
            hp.g2 = 1;
            hp.drive = DuffingMode{1.3, 0.0, 1.0, 0.0, {}};
            hp.sigma = s;
            worst_tr = std::max(worst_tr, std::abs(monodromy(hp).trace - 2 * std::cos(std::sqrt(q0) * s)));
        }
    v.require(worst_tr < trace_tol, "autonomous trace");
    const auto spec = solve_spectrum(0.5, 6);
    int bracketed = 0, pairs = 0;
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t k = i + 1; k < 6; ++k) {
            const double l = spec[i].lambda, rho = spec[k].lambda;
            const double D = std::sqrt(2 * (std::pow(rho, 4) - std::pow(l, 4)));
            const double below = std::abs(monodromy(l2_hill(l, rho, D * (1 - bracket))).trace);
            const double above = std::abs(monodromy(l2_hill(l, rho, D * (1 + bracket))).trace);
            ++pairs;
            bracketed += below <= 2 && above > 2;
        }
    v.require(bracketed == pairs, "L2 boundary bracket");
    report(7, "Floquet core", v,
           "max |det-1| " + fmt("%.1e", worst_det) + ", max trace dev " + fmt("%.1e", worst_tr) + ", " + std::to_string(bracketed) + "/" +
               std::to_string(pairs) + " boundaries bracketed");
}

// 8. linear energy thresholds
void linear_thresholds()
{
    constexpr double l2_ref = 216.953, l2_tol = 0.01, bend_ref = 0.326, bend_tol = 0.05;
    Verdict v;
    const auto spec = solve_spectrum(0.5, 12);
    const auto l2 = linear_energy_threshold(spec, BeamVariant::SuperL2);
    const auto bd = linear_energy_threshold(spec, BeamVariant::SuperBending);
    v.require(rel(l2.E, l2_ref) <= l2_tol, "L2 threshold");
    v.require(rel(bd.E, bend_ref) <= bend_tol, "bending threshold");
    report(8, "linear thresholds at a = 1/2", v,
           "L2 E = " + fmt("%.3f", l2.E) + " (" + std::to_string(l2.j) + "," + std::to_string(l2.k) + "), bending E = " + fmt("%.4f", bd.E) + " (" +
               std::to_string(bd.j) + "," + std::to_string(bd.k) + ")");
}

// 9. nonlinear thresholds
void nonlinear_thresholds()
{
    constexpr double l2_tol = 0.10, cubic_tol = 0.15, budget_seconds = 600, reference_cores = 8;
    Verdict v;
    const auto grid = cli::default_a_grid();
    const NonlinearityKind l2{Variant::SuperL2, 1};
    std::vector<double> cell_seconds(grid.size());
    const auto t0 = Clock::now();
    const auto cells = parallel_map<SweepCell>(grid.size(), [&](std::size_t i) {
        const auto c0 = Clock::now();
        auto cell = sweep_cell(grid[i], l2, ThresholdParams{});
        cell_seconds[i] = seconds_since(c0);
        return cell;
    });
    const double wall = seconds_since(t0);
    // projected wall time with dynamic scheduling of the same cells on the reference core count
    std::vector<double> lanes(std::size_t(reference_cores), 0.0);
    for (double s : cell_seconds) *std::min_element(lanes.begin(), lanes.end()) += s;
    const double projected = *std::max_element(lanes.begin(), lanes.end());
    const std::map<double, double> table{{0.2, 25.73}, {0.5, 263.8}, {0.9, 14.84}};
    std::ostringstream det;
    std::size_t best = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (cells[i].E12 > cells[best].E12 || !std::isfinite(cells[best].E12)) best = i;
        for (const auto& [a, ref] : table)
            if (std::abs(grid[i] - a) < 1e-12) {
                v.require(rel(cells[i].E12, ref) <= l2_tol, "L2 E12 at a = " + fmt("%.1f", a));
                det << "E12(" << fmt("%.1f", a) << ") = " << fmt("%.3f", cells[i].E12) << ", ";
            }
    }
    v.require(std::abs(grid[best] - 0.5) < 1e-12, "argmax at a = 1/2");
    det << "argmax a = " << fmt("%.4g", grid[best]) << ", ";
    // local cubic prevailing modes 1 and 2 at a = 1/2
    const auto c = assemble_coefficients(solve_spectrum(0.5, 12));
    ThresholdParams p;
    p.step = 0.1;
    const NonlinearityKind cubic{Variant::LocalCubic, 1};
    const double E1 = energy_threshold(c, 1, cubic, p).E, E2 = energy_threshold(c, 2, cubic, p).E;
    v.require(rel(E1, 1941) <= cubic_tol, "local cubic E1");
    v.require(rel(E2, 422) <= cubic_tol, "local cubic E2");
    v.require(projected < budget_seconds, "projected sweep runtime");
    det << "cubic E1 = " << fmt("%.2f", E1) << ", E2 = " << fmt("%.2f", E2) << ", sweep " << fmt("%.0f", wall) << " s on " << worker_count()
        << " worker(s), projected " << fmt("%.0f", projected) << " s on 8";
    report(9, "nonlinear thresholds", v, det.str());
}

// 10. fish-bone thresholds
void fishbone()
{
    constexpr double lin_ref = 6.276, lin_tol = 0.02, nl_ref = 14.933, nl_tol = 0.10, er_lo = 50, er_hi = 200;
    Verdict v;
    const auto grid = cli::default_fishbone_grid();
    const std::vector<double> sigmas{0, 0.1, 0.2, 0.5, 1};
    const auto cells = parallel_map<TorsionalThreshold>(grid.size() * sigmas.size(), [&](std::size_t i) {
        return torsional_threshold(grid[i / sigmas.size()], HangerModel{sigmas[i % sigmas.size()]}, TorsionalParams{});
    });
    const auto& rigid = cells[0];
    v.require(rel(rigid.linear.E_grid, lin_ref) <= lin_tol, "linear energy");
    v.require(rigid.nonlinear && rel(rigid.nonlinear->E, nl_ref) <= nl_tol, "nonlinear energy");
    int monotone = 0;
    double er_min = 1e300, er_max = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        bool dec = true;
        for (std::size_t s = 1; s < sigmas.size(); ++s)
            dec = dec && cells[i * sigmas.size() + s].linear.delta_lin < cells[i * sigmas.size() + s - 1].linear.delta_lin;
        monotone += dec;
        for (std::size_t s = 0; s < sigmas.size(); ++s)
            if (const auto& n = cells[i * sigmas.size() + s].nonlinear) {
                er_min = std::min(er_min, n->ER_tau);
                er_max = std::max(er_max, n->ER_tau);
            }
    }
    v.require(monotone == int(grid.size()), "monotone linear threshold");
    v.require(er_min >= er_lo && er_max <= er_hi, "expansion rate");
    report(10, "fish-bone thresholds", v,
           "E_lin = " + fmt("%.4f", rigid.linear.E_grid) + ", E = " + fmt("%.3f", rigid.nonlinear ? rigid.nonlinear->E : NAN) + ", monotone at " +
               std::to_string(monotone) + "/" + std::to_string(grid.size()) + ", ER in [" + fmt("%.1f", er_min) + ", " + fmt("%.1f", er_max) + "]");
}

// 11. property suites
void properties()
{
    constexpr double energy_tol = 1e-6, invariance_tol = 1e-10, symmetry_tol = 1e-12;
    Verdict v;
    const auto c = assemble_coefficients(solve_spectrum(0.6, 6));
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    double drift = 0;
    for (Variant var : {Variant::SuperBending, Variant::Stretching, Variant::SuperL2, Variant::LocalCubic, Variant::LocalLinear}) {
        const NonlinearityKind kind{var, 1};
        State y0(12);
        for (auto& x : y0) x = U(rng) * (var == Variant::SuperBending ? 0.1 : 1);
        const auto tr = integrate_modal(c, kind, y0, {16, 401, {1e-11, 1e-13}});
        const double E0 = modal_energy(c, kind, y0);
        for (const auto& y : tr.y) drift = std::max(drift, std::abs(modal_energy(c, kind, y) - E0) / E0);
    }
    v.require(drift < energy_tol, "energy conservation");
    // parity invariance of the local cubic force
    State odd(12, 0.0);
    for (std::size_t n = 0; n < 6; ++n)
        if (c.parity[n] == Parity::Odd) odd[n] = 0.5;
    double leak = 0;
    for (const auto& y : integrate_modal(c, {Variant::LocalCubic, 1}, odd, {16, 401, {1e-10, 1e-12}}).y)
        for (std::size_t n = 0; n < 6; ++n)
            if (c.parity[n] == Parity::Even) leak = std::max(leak, std::abs(y[n]));
    // inactive modes of the nonlocal variants
    State two(12, 0.0);
    two[0] = 0.8;
    two[3] = 0.3;
    for (const auto& y : integrate_modal(c, {Variant::SuperL2, 1}, two, {16, 401, {1e-10, 1e-12}}).y)
        for (std::size_t n : {1, 2, 4, 5}) leak = std::max(leak, std::abs(y[n]));
    // torsional component of purely longitudinal fish-bone data
    const auto pair = make_fishbone_pair(solve_spectrum(0.6, 1)[0], torsion_spectrum(0.6, 2)[1], HangerModel{0.3});
    for (const auto& y : integrate_two_mode(pair, 1.5, 0.0, 16, 401).y) leak = std::max(leak, std::abs(y[1]));
    v.require(leak < invariance_tol, "invariant subspaces");
    // hanger functional symmetries and vanishing on odd modes
    double sym = 0;
    for (double w : {-1.2, 0.5, 2.0})
        for (double z : {0.3, 1.1}) {
            sym = std::max(sym, std::abs(gamma_fn(pair, w, z) - gamma_fn(pair, w, -z)));
            sym = std::max(sym, std::abs(xi_fn(pair, w, z) + xi_fn(pair, w, -z)));
        }
    const auto odd_pair = make_fishbone_pair(solve_spectrum(0.6, 2)[1], torsion_spectrum(0.6, 2)[1], HangerModel{0.3});
    for (double w : {0.4, 1.9}) sym = std::max({sym, std::abs(psi_fn(odd_pair, w)), std::abs(b_sigma(odd_pair, w))});
    v.require(sym < symmetry_tol, "hanger symmetries");
    // Burdina against monodromy
    int proved = 0, contradicted = 0;
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 30; ++j) {
            const auto hp = l2_hill(1.0, std::pow(0.3 + 11.7 * i / 29.0, 0.25), 0.05 + 2.95 * j / 29.0);
            if (burdina_check(hp, 2001).proved_stable) {
                ++proved;
                contradicted += !monodromy(hp).stable;
            }
        }
    v.require(contradicted == 0, "Burdina consistency");
    report(11, "property suites", v,
           "energy drift " + fmt("%.1e", drift) + ", leak " + fmt("%.1e", leak) + ", symmetry " + fmt("%.1e", sym) + ", Burdina " + std::to_string(proved) +
               " proved / " + std::to_string(contradicted) + " contradicted");
}

} // namespace

int main()
{
    beam_spectra();
    smooth_family();
    torsional_spectra();
    coupling();
    stationary();
    nodal();
    floquet();
    linear_thresholds();
    nonlinear_thresholds();
    fishbone();
    properties();
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
