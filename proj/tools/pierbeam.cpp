#include "pierbeam/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

using namespace pierbeam::cli;

namespace {

struct Sub {
    CLI::App* app = nullptr;
    std::string manifest;
    std::map<std::string, std::string> values;
};

// Options shared by every subcommand map one-to-one onto manifest keys.
void add_keys(Sub& s, const std::vector<std::pair<std::string, std::string>>& keys)
{
    s.app->add_option("--manifest", s.manifest, "key = value manifest; command-line options override it");
    for (const auto& [key, help] : keys) {
        std::string flag = "--" + key;
        for (auto& c : flag)
            if (c == '_') c = '-';
        s.app->add_option(flag, s.values[key], help);
    }
}

const std::vector<std::pair<std::string, std::string>> geometry{
    {"a", "pier positions: list '0.2,0.5' or range 'lo:hi:step'"}, {"b", "left pier position (default b = a)"}, {"modes", "number of modes"}};
const std::vector<std::pair<std::string, std::string>> search{
    {"eta", "growth ratio eta"},     {"step", "amplitude step"},       {"r", "residual-mode amplitude"},
    {"T", "time horizon"},           {"EN_max", "energy budget"},      {"samples", "trajectory samples"},
    {"prevalence_start", "start ramp at the prevalence bound"},        {"mode_list", "restrict to these modes"}};
const std::vector<std::pair<std::string, std::string>> outputs{
    {"csv", "CSV output (default stdout)"}, {"json", "JSON output"}, {"svg", "SVG chart output"}, {"workers", "worker threads"}};

std::vector<std::pair<std::string, std::string>> concat(std::initializer_list<std::vector<std::pair<std::string, std::string>>> parts)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"pier-supported beam and fish-bone bridge stability tool"};
    app.require_subcommand(1);

    std::map<std::string, Sub> subs;
    auto make = [&](const std::string& name, const std::string& help, std::vector<std::pair<std::string, std::string>> keys) {
        Sub& s = subs[name];
        s.app = app.add_subcommand(name, help);
        add_keys(s, keys);
    };
    make("spectrum", "beam eigenvalues over a pier grid", concat({geometry, outputs}));
    make("torsion", "torsional eigenvalues over a pier grid", concat({geometry, outputs}));
    make("stationary", "stationary solutions with pier constraints",
         concat({geometry, {{"gamma", "restoring coefficient"}, {"load", "constant:c or sin:c:m"}}, outputs}));
    make("hill-chart", "Floquet stability chart of the linearized equation",
         concat({{{"variant", "super-l2 or super-bending"},
                  {"lambda", "reference eigenvalue"},
                  {"ratio_min", "smallest rho^4/lambda^4"},
                  {"ratio_max", "largest rho^4/lambda^4"},
                  {"delta_min", "smallest amplitude"},
                  {"delta_max", "largest amplitude"},
                  {"nx", "ratio samples"},
                  {"ny", "amplitude samples"}},
                 outputs}));
    make("beam-threshold", "linear or nonlinear energy thresholds of the beam",
         concat({geometry, {{"variant", "nonlinearity"}, {"kind", "linear or nonlinear"}}, search, outputs}));
    make("fishbone-threshold", "torsional instability thresholds of the fish-bone model",
         concat({geometry, {{"sigma", "hanger elasticities"}}, search, outputs}));
    make("render-chart", "render a result CSV as SVG",
         {{"input", "CSV file"}, {"x", "x column"}, {"y", "y column"}, {"value", "value or series column"}, {"chart", "heatmap or line"}, {"svg", "SVG output"}});
    auto* runsub = app.add_subcommand("run", "execute a manifest");
    std::string run_path;
    runsub->add_option("manifest", run_path, "manifest file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        RunManifest m;
        if (runsub->parsed()) {
            m = load_manifest(run_path);
        } else {
            for (auto& [name, s] : subs) {
                if (!s.app->parsed()) continue;
                if (!s.manifest.empty()) {
                    m = load_manifest(s.manifest);
                    if (!m.command.empty() && m.command != name) throw pierbeam::ConfigError("manifest is for '" + m.command + "'");
                } else {
                    m.a = name == "fishbone-threshold" ? default_fishbone_grid() : default_a_grid();
                }
                m.command = name;
                for (const auto& [key, value] : s.values)
                    if (s.app->count("--" + [](std::string k) {
                            for (auto& c : k)
                                if (c == '_') c = '-';
                            return k;
                        }(key)))
                        apply_key(m, key, value);
            }
        }
        return run(m, std::cout, std::cerr);
    } catch (const pierbeam::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const pierbeam::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
