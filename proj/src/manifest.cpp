#include "pierbeam/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace pierbeam::cli {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& s)
{
    const std::string t = trim(s);
    // fractions such as 14/25 are accepted wherever a number is
    if (auto slash = t.find('/'); slash != std::string::npos) {
        const double n = to_double(key, t.substr(0, slash)), d = to_double(key, t.substr(slash + 1));
        if (d == 0) throw ConfigError(key + ": zero denominator");
        return n / d;
    }
    double v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || p != t.data() + t.size()) throw ConfigError(key + ": not a number '" + s + "'");
    return v;
}

std::size_t to_count(const std::string& key, const std::string& s)
{
    const double v = to_double(key, s);
    if (v < 1 || v != std::floor(v)) throw ConfigError(key + ": expected a positive integer");
    return std::size_t(v);
}

bool to_bool(const std::string& key, const std::string& s)
{
    const std::string t = trim(s);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError(key + ": expected true/false");
}

std::string join(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
    return s;
}

} // namespace

std::vector<double> default_a_grid()
{
    std::vector<double> g{1.0 / 3, 14.0 / 25, 2.0 / 3};
    for (int i = 1; i <= 9; ++i) g.push_back(i / 10.0);
    std::sort(g.begin(), g.end());
    return g;
}

std::vector<double> default_fishbone_grid() { return {0.5, 14.0 / 25, 0.6, 2.0 / 3, 0.7, 0.8, 0.9}; }

std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        if (trim(item).empty()) continue;
        out.push_back(to_double("list", item));
    }
    return out;
}

std::vector<double> parse_grid(const std::string& s)
{
    const std::string t = trim(s);
    if (std::count(t.begin(), t.end(), ':') == 2) {
        const auto c1 = t.find(':'), c2 = t.find(':', c1 + 1);
        const double lo = to_double("grid", t.substr(0, c1)), hi = to_double("grid", t.substr(c1 + 1, c2 - c1 - 1)),
                     st = to_double("grid", t.substr(c2 + 1));
        if (!(st > 0)) throw ConfigError("grid: step must be positive");
        std::vector<double> g;
        const long n = std::lround(std::floor((hi - lo) / st + 1e-9));
        for (long i = 0; i <= n; ++i) g.push_back(lo + double(i) * st);
        return g;
    }
    return parse_list(t);
}

void apply_key(RunManifest& m, const std::string& key, const std::string& raw)
{
    const std::string v = trim(raw);
    if (key == "command") m.command = v;
    else if (key == "a") m.a = parse_grid(v);
    else if (key == "b") m.b = to_double(key, v);
    else if (key == "modes") m.modes = to_count(key, v);
    else if (key == "variant") m.variant = v;
    else if (key == "kind") m.kind = v;
    else if (key == "eta") m.eta = to_double(key, v);
    else if (key == "step") m.step = to_double(key, v);
    else if (key == "r") m.r = to_double(key, v);
    else if (key == "T") m.T = to_double(key, v);
    else if (key == "EN_max") m.EN_max = to_double(key, v);
    else if (key == "samples") m.samples = to_count(key, v);
    else if (key == "prevalence_start") m.prevalence_start = to_bool(key, v);
    else if (key == "sigma") m.sigma = parse_list(v);
    else if (key == "mode_list") {
        m.mode_list.clear();
        for (double d : parse_list(v)) {
            if (d < 0 || d != std::floor(d)) throw ConfigError("mode_list: expected non-negative integers");
            m.mode_list.push_back(int(d));
        }
    }
    else if (key == "gamma") m.gamma = to_double(key, v);
    else if (key == "load") m.load = v;
    else if (key == "lambda") m.lambda = to_double(key, v);
    else if (key == "ratio_min") m.ratio_min = to_double(key, v);
    else if (key == "ratio_max") m.ratio_max = to_double(key, v);
    else if (key == "delta_min") m.delta_min = to_double(key, v);
    else if (key == "delta_max") m.delta_max = to_double(key, v);
    else if (key == "nx") m.nx = to_count(key, v);
    else if (key == "ny") m.ny = to_count(key, v);
    else if (key == "input") m.input = v;
    else if (key == "x") m.x_col = v;
    else if (key == "y") m.y_col = v;
    else if (key == "value") m.value_col = v;
    else if (key == "chart") m.chart = v;
    else if (key == "csv") m.csv = v;
    else if (key == "json") m.json = v;
    else if (key == "svg") m.svg = v;
    else if (key == "workers") m.workers = to_count(key, v);
    else throw ConfigError("unknown key '" + key + "'");
}

RunManifest parse_manifest(const std::string& text)
{
    RunManifest m;
    m.a.clear();
    bool a_seen = false;
    std::set<std::string> seen;
    std::stringstream ss(text);
    int lineno = 0;
    for (std::string line; std::getline(ss, line);) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        if (key == "a") a_seen = true;
        apply_key(m, key, line.substr(eq + 1));
    }
    if (!a_seen) m.a = m.command == "fishbone-threshold" ? default_fishbone_grid() : default_a_grid();
    return m;
}

RunManifest load_manifest(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read manifest '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str());
}

void RunManifest::validate() const
{
    static const std::set<std::string> commands{"spectrum", "torsion", "stationary", "hill-chart", "beam-threshold", "fishbone-threshold", "render-chart"};
    if (!commands.count(command)) throw ConfigError("unknown command '" + command + "'");
    const bool needs_grid = command != "hill-chart" && command != "render-chart";
    if (needs_grid && a.empty()) throw ConfigError("empty a-grid");
    for (double v : a)
        if (!(v > 0 && v < 1)) throw ConfigError("a-grid values must lie in (0,1)");
    if (b && !(*b > 0 && *b < 1)) throw ConfigError("b must lie in (0,1)");
    if (!(eta > 0 && eta < 1)) throw ConfigError("eta must lie in (0,1)");
    if (!(step > 0)) throw ConfigError("step must be positive");
    if (!(r > 0)) throw ConfigError("r must be positive");
    if (!(T > 0)) throw ConfigError("T must be positive");
    if (!(EN_max > 0)) throw ConfigError("EN_max must be positive");
    if (samples < 2) throw ConfigError("samples must be at least 2");
    for (int j : mode_list)
        if (std::size_t(j) >= modes) throw ConfigError("mode_list entries must be below modes");
    if (command == "fishbone-threshold") {
        if (sigma.empty()) throw ConfigError("empty sigma list");
        for (double s : sigma)
            if (s < 0) throw ConfigError("sigma must be non-negative");
    }
    if (command == "beam-threshold" && kind != "linear" && kind != "nonlinear") throw ConfigError("kind must be linear or nonlinear");
    if (command == "hill-chart") {
        if (!(lambda > 0)) throw ConfigError("lambda must be positive");
        if (!(ratio_min > 0 && ratio_max > ratio_min)) throw ConfigError("ratio range must satisfy 0 < ratio_min < ratio_max");
        if (!(delta_min >= 0 && delta_max > delta_min)) throw ConfigError("delta range must satisfy 0 <= delta_min < delta_max");
    }
    if (command == "render-chart") {
        if (input.empty()) throw ConfigError("render-chart needs an input CSV");
        if (chart != "heatmap" && chart != "line") throw ConfigError("chart must be heatmap or line");
        if (svg.empty()) throw ConfigError("render-chart needs an svg output path");
    }
}

std::vector<std::pair<std::string, std::string>> RunManifest::describe() const
{
    std::vector<std::pair<std::string, std::string>> d{{"command", command}};
    auto num = [&](const char* k, double v) { d.emplace_back(k, format_number(v)); };
    auto cnt = [&](const char* k, std::size_t v) { d.emplace_back(k, std::to_string(v)); };
    if (command == "render-chart") {
        d.insert(d.end(), {{"input", input}, {"chart", chart}, {"x", x_col}, {"y", y_col}, {"value", value_col}});
        return d;
    }
    if (command != "hill-chart") {
        d.emplace_back("a", join(a));
        if (b) num("b", *b);
        cnt("modes", modes);
    }
    if (command == "stationary") {
        num("gamma", gamma);
        d.emplace_back("load", load);
    }
    if (command == "hill-chart" || command == "beam-threshold") d.emplace_back("variant", variant);
    if (command == "hill-chart") {
        num("lambda", lambda);
        num("ratio_min", ratio_min);
        num("ratio_max", ratio_max);
        num("delta_min", delta_min);
        num("delta_max", delta_max);
        cnt("nx", nx);
        cnt("ny", ny);
    }
    if (command == "beam-threshold") d.emplace_back("kind", kind);
    if (command == "beam-threshold" || command == "fishbone-threshold") {
        num("eta", eta);
        num("step", step);
        num("r", r);
        num("T", T);
        num("EN_max", EN_max);
        cnt("samples", samples);
        d.emplace_back("prevalence_start", prevalence_start ? "true" : "false");
        if (!mode_list.empty()) {
            std::string s;
            for (std::size_t i = 0; i < mode_list.size(); ++i) s += (i ? "," : "") + std::to_string(mode_list[i]);
            d.emplace_back("mode_list", s);
        }
    }
    if (command == "fishbone-threshold") d.emplace_back("sigma", join(sigma));
    return d;
}

} // namespace pierbeam::cli
