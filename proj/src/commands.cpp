#include "pierbeam/cli.hpp"
#include "pierbeam/pierbeam.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace pierbeam::cli {

namespace {

using Row = std::vector<std::string>;

std::string num(double v) { return format_number(v); }
std::string num(int v) { return std::to_string(v); }
std::string num(std::size_t v) { return std::to_string(v); }

std::size_t workers_for(const RunManifest& m) { return m.workers ? m.workers : worker_count(); }

Load parse_load(const std::string& s)
{
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    try {
        if (parts.size() == 2 && parts[0] == "constant") return Load::constant(std::stod(parts[1]));
        if (parts.size() == 3 && parts[0] == "sin") return Load::sinusoid(std::stod(parts[1]), std::stod(parts[2]));
    } catch (const std::exception&) {
    }
    throw ConfigError("load must be constant:c or sin:c:m, got '" + s + "'");
}

BeamVariant linear_variant(const std::string& v)
{
    if (v == "super-l2") return BeamVariant::SuperL2;
    if (v == "super-bending") return BeamVariant::SuperBending;
    throw ConfigError("linear analysis supports super-l2 and super-bending, got '" + v + "'");
}

// index of the smallest finite value, or npos
std::size_t argmin(const std::vector<double>& v)
{
    std::size_t best = std::string::npos;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (std::isfinite(v[i]) && (best == std::string::npos || v[i] < v[best])) best = i;
    return best;
}

Table spectrum(const RunManifest& m)
{
    if (m.b && *m.b != m.a.front()) throw ConfigError("spectrum supports symmetric piers only (b = a)");
    Table t;
    t.columns = {"a", "n", "lambda", "mu", "parity", "family", "upsilon", "zeros"};
    auto cells = parallel_map<std::vector<BeamEigenpair>>(m.a.size(), [&](std::size_t i) { return solve_spectrum(m.a[i], m.modes); }, workers_for(m));
    for (std::size_t i = 0; i < m.a.size(); ++i)
        for (const auto& e : cells[i]) {
            const auto z = count_zeros(e);
            t.rows.push_back({num(m.a[i]), num(e.n), num(e.lambda), num(e.mu), to_string(e.parity), to_string(e.family), num(e.upsilon),
                              num(z.effective)});
        }
    std::ostringstream s;
    const auto& first = cells.front().front();
    s << "lowest eigenvalue lambda_0 = " << num(first.lambda) << " at a = " << num(m.a.front());
    t.summary.push_back(s.str());
    return t;
}

Table torsion(const RunManifest& m)
{
    Table t;
    t.columns = {"a", "b", "rank", "kappa", "mu", "family", "multiplicity"};
    auto cells = parallel_map<std::vector<TorsionEigenpair>>(
        m.a.size(), [&](std::size_t i) { return torsion_spectrum(PierConfig(m.a[i], m.b.value_or(m.a[i])), m.modes); }, workers_for(m));
    for (std::size_t i = 0; i < m.a.size(); ++i)
        for (const auto& e : cells[i])
            t.rows.push_back({num(m.a[i]), num(m.b.value_or(m.a[i])), num(e.rank), num(e.kappa), num(e.mu), to_string(e.family), num(e.multiplicity)});
    t.summary.push_back(std::to_string(t.rows.size()) + " torsional eigenvalues over " + std::to_string(m.a.size()) + " pier positions");
    return t;
}

Table stationary(const RunManifest& m)
{
    const Load f = parse_load(m.load);
    if (m.gamma < 0) throw ConfigError("gamma must be non-negative");
    Table t;
    t.columns = {"a", "b", "gamma", "alpha_f", "beta_f", "energy_gap", "condition"};
    auto cells = parallel_map<StationarySolution>(
        m.a.size(), [&](std::size_t i) { return solve_stationary(PierConfig(m.a[i], m.b.value_or(m.a[i])), m.gamma, f); }, workers_for(m));
    std::vector<double> gaps;
    for (std::size_t i = 0; i < m.a.size(); ++i) {
        const auto& s = cells[i];
        gaps.push_back(energy_gap(s));
        t.rows.push_back({num(s.cfg.a), num(s.cfg.b), num(m.gamma), num(s.alpha_f), num(s.beta_f), num(gaps.back()), num(s.condition)});
    }
    if (auto k = argmin(gaps); k != std::string::npos)
        t.summary.push_back("smallest energy gap " + num(gaps[k]) + " at a = " + num(m.a[k]));
    return t;
}

Table hill_chart(const RunManifest& m)
{
    const BeamVariant v = linear_variant(m.variant);
    Table t;
    t.columns = {"ratio", "delta", "trace", "stable", "ER"};
    auto rows = parallel_map<std::vector<Row>>(
        m.ny,
        [&](std::size_t iy) {
            std::vector<Row> out;
            const double delta = m.ny > 1 ? m.delta_min + (m.delta_max - m.delta_min) * double(iy) / double(m.ny - 1) : m.delta_min;
            for (std::size_t ix = 0; ix < m.nx; ++ix) {
                const double ratio = m.nx > 1 ? m.ratio_min + (m.ratio_max - m.ratio_min) * double(ix) / double(m.nx - 1) : m.ratio_min;
                const double rho = m.lambda * std::pow(ratio, 0.25);
                const auto hp = v == BeamVariant::SuperL2 ? l2_hill(m.lambda, rho, delta) : bending_hill(m.lambda, rho, delta);
                const auto r = monodromy(hp);
                out.push_back({num(ratio), num(delta), num(r.trace), r.stable ? "1" : "0", num(r.ER)});
            }
            return out;
        },
        workers_for(m));
    std::size_t unstable = 0;
    for (auto& block : rows)
        for (auto& r : block) {
            unstable += r[3] == "0";
            t.rows.push_back(std::move(r));
        }
    t.summary.push_back(std::to_string(unstable) + " of " + std::to_string(t.rows.size()) + " grid points unstable");
    return t;
}

ThresholdParams threshold_params(const RunManifest& m)
{
    ThresholdParams p;
    p.N = m.modes;
    p.eta = m.eta;
    p.step = m.step;
    p.r = m.r;
    p.T = m.T;
    p.EN_max = m.EN_max;
    p.samples = m.samples;
    p.start_at_r_over_eta2 = !m.prevalence_start;
    return p;
}

Table beam_linear(const RunManifest& m)
{
    const BeamVariant v = linear_variant(m.variant);
    Table t;
    t.columns = {"a", "E_lin", "j", "k", "ratio", "D"};
    auto cells = parallel_map<LinearEnergyThreshold>(
        m.a.size(), [&](std::size_t i) { return linear_energy_threshold(solve_spectrum(m.a[i], m.modes), v); }, workers_for(m));
    std::vector<double> E;
    for (std::size_t i = 0; i < m.a.size(); ++i) {
        const auto& c = cells[i];
        E.push_back(c.E);
        t.rows.push_back({num(m.a[i]), num(c.E), num(c.j), num(c.k), num(c.ratio), num(c.D)});
    }
    if (auto k = argmin(E); k != std::string::npos) {
        t.summary.push_back("min E_lin = " + num(E[k]) + " at a = " + num(m.a[k]) + ", weakest couple (" + num(cells[k].j) + "," + num(cells[k].k) + ")");
        std::size_t hi = k;
        for (std::size_t i = 0; i < E.size(); ++i)
            if (std::isfinite(E[i]) && E[i] > E[hi]) hi = i;
        t.summary.push_back("max E_lin = " + num(E[hi]) + " at a = " + num(m.a[hi]));
    }
    return t;
}

Table beam_nonlinear(const RunManifest& m)
{
    const NonlinearityKind kind{variant_from_string(m.variant)};
    const ThresholdParams p = threshold_params(m);
    Table t;
    t.columns = {"a", "E", "j", "k", "delta", "tau", "T_W", "ER_tau", "runs"};
    auto cells = parallel_map<SweepCell>(
        m.a.size(),
        [&](std::size_t i) {
            if (m.mode_list.empty()) return sweep_cell(m.a[i], kind, p);
            SweepCell cell;
            cell.a = m.a[i];
            const auto c = assemble_coefficients(solve_spectrum(m.a[i], p.N));
            for (int j : m.mode_list) {
                auto r = energy_threshold(c, std::size_t(j), kind, p);
                if (r.E < cell.E12) {
                    cell.E12 = r.E;
                    cell.argmin = j;
                }
                cell.per_mode.push_back(std::move(r));
            }
            return cell;
        },
        workers_for(m));
    std::vector<double> E;
    for (const auto& cell : cells) {
        E.push_back(cell.E12);
        const ThresholdResult* best = nullptr;
        std::size_t runs = 0;
        for (const auto& r : cell.per_mode) {
            runs += r.runs;
            if (r.report && r.E == cell.E12) best = &r;
        }
        if (best) {
            const auto& rep = *best->report;
            t.rows.push_back({num(cell.a), num(cell.E12), num(rep.j), num(rep.k), num(rep.delta), num(rep.tau), num(rep.T_W), num(rep.ER_tau), num(runs)});
        } else {
            t.rows.push_back({num(cell.a), "inf", "-1", "-1", "nan", "nan", "nan", "nan", num(runs)});
        }
    }
    if (auto k = argmin(E); k != std::string::npos) {
        std::size_t hi = k;
        for (std::size_t i = 0; i < E.size(); ++i)
            if (std::isfinite(E[i]) && E[i] > E[hi]) hi = i;
        t.summary.push_back("min E = " + num(E[k]) + " at a = " + num(m.a[k]) + ", weakest couple (" + t.rows[k][2] + "," + t.rows[k][3] + ")");
        t.summary.push_back("max E = " + num(E[hi]) + " at a = " + num(m.a[hi]));
    } else {
        t.summary.push_back("no instability below EN_max");
    }
    return t;
}

Table fishbone(const RunManifest& m)
{
    TorsionalParams tp;
    tp.eta = m.eta;
    tp.step = m.step;
    tp.r = m.r;
    tp.T = m.T;
    tp.EN_max = m.EN_max;
    tp.samples = m.samples;
    const std::size_t ns = m.sigma.size();
    auto cells = parallel_map<TorsionalThreshold>(
        m.a.size() * ns, [&](std::size_t i) { return torsional_threshold(m.a[i / ns], HangerModel{m.sigma[i % ns]}, tp, m.modes); }, workers_for(m));
    Table t;
    t.columns = {"a", "sigma", "delta_lin", "E_lin", "linear_mode", "delta", "tau", "ER_tau", "E", "prevailing_mode"};
    std::vector<double> E;
    for (const auto& c : cells) {
        E.push_back(c.nonlinear ? c.nonlinear->E : INFINITY);
        Row row{num(c.a), num(c.sigma), num(c.linear.delta_lin), num(c.linear.E_grid), num(c.linear_mode)};
        if (c.nonlinear)
            row.insert(row.end(), {num(c.nonlinear->delta), num(c.nonlinear->tau), num(c.nonlinear->ER_tau), num(c.nonlinear->E), num(c.nonlinear_mode)});
        else
            row.insert(row.end(), {"nan", "nan", "nan", "inf", "-1"});
        t.rows.push_back(std::move(row));
    }
    if (auto k = argmin(E); k != std::string::npos)
        t.summary.push_back("min nonlinear energy " + num(E[k]) + " at a = " + num(cells[k].a) + ", sigma = " + num(cells[k].sigma) + ", mode e_" +
                            num(cells[k].nonlinear_mode));
    return t;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

} // namespace

Table execute(const RunManifest& m)
{
    m.validate();
    if (m.command == "spectrum") return spectrum(m);
    if (m.command == "torsion") return torsion(m);
    if (m.command == "stationary") return stationary(m);
    if (m.command == "hill-chart") return hill_chart(m);
    if (m.command == "beam-threshold") return m.kind == "linear" ? beam_linear(m) : beam_nonlinear(m);
    if (m.command == "fishbone-threshold") return fishbone(m);
    throw ConfigError("command '" + m.command + "' produces no table");
}

int run(const RunManifest& m, std::ostream& out, std::ostream& log)
{
    try {
        m.validate();
        const auto header = m.describe();
        if (m.command == "render-chart") {
            const auto data = parse_csv(read_file(m.input));
            const std::string title = m.value_col.empty() ? m.y_col : m.value_col;
            const std::string svg = m.chart == "heatmap" ? render_heatmap(data, m.x_col, m.y_col, m.value_col, title)
                                                         : render_lines(data, m.x_col, m.y_col, m.value_col, m.y_col);
            write_file(m.svg, svg);
            log << "wrote " << m.svg << "\n";
            return 0;
        }
        // everything is computed before the first byte is written
        const Table t = execute(m);
        const std::string csv = to_csv(t, header);
        std::string svg;
        if (!m.svg.empty()) {
            const auto data = parse_csv(csv);
            if (m.command == "hill-chart") svg = render_heatmap(data, "ratio", "delta", "stable", m.variant + " stability");
            else if (m.command == "fishbone-threshold") svg = render_lines(data, "a", "delta_lin", "sigma", "delta_lin");
            else if (m.command == "beam-threshold") svg = render_lines(data, "a", m.kind == "linear" ? "E_lin" : "E", "", m.variant);
            else if (m.command == "spectrum") svg = render_lines(data, "a", "lambda", "n", "lambda");
            else if (m.command == "torsion") svg = render_lines(data, "a", "kappa", "rank", "kappa");
            else svg = render_lines(data, "a", "energy_gap", "", "energy gap");
        }
        if (m.csv.empty()) out << csv;
        else write_file(m.csv, csv);
        if (!m.json.empty()) write_file(m.json, to_json(t, header));
        if (!m.svg.empty()) write_file(m.svg, svg);
        for (const auto& s : t.summary) log << s << "\n";
        return 0;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        log << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

} // namespace pierbeam::cli
