#pragma once

// Batch front end: manifests, command dispatch, tabular output and SVG charts.

#include "core.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace pierbeam::cli {

struct RunManifest {
    std::string command;

    // geometry
    std::vector<double> a;
    std::optional<double> b;
    std::size_t modes = 12;

    // threshold searches
    std::string variant = "super-l2";
    std::string kind = "nonlinear"; // beam-threshold: linear | nonlinear
    double eta = 0.1;
    double step = 0.01;
    double r = 0.01;
    double T = 16;
    double EN_max = 1e5;
    std::size_t samples = 4001;
    bool prevalence_start = false;
    std::vector<double> sigma{0.0};
    std::vector<int> mode_list;

    // stationary
    double gamma = 0;
    std::string load = "constant:24";

    // hill-chart
    double lambda = 1;
    double ratio_min = 0.5, ratio_max = 10;
    double delta_min = 0, delta_max = 4;
    std::size_t nx = 60, ny = 40;

    // render-chart
    std::string input;
    std::string x_col = "ratio", y_col = "delta", value_col = "stable";
    std::string chart = "heatmap"; // heatmap | line

    // outputs; empty csv means stdout
    std::string csv, json, svg;
    std::size_t workers = 0; // 0: environment or hardware

    // every parameter as ordered key/value text, for the output header block
    std::vector<std::pair<std::string, std::string>> describe() const;
    void validate() const;
};

// Default pier grid: 0.1 .. 0.9 together with 1/3, 14/25 and 2/3, sorted.
std::vector<double> default_a_grid();
// Grid for the fish-bone tables, a >= 1/2.
std::vector<double> default_fishbone_grid();

// "0.1, 0.5" or "lo:hi:step"; throws ConfigError.
std::vector<double> parse_grid(const std::string& s);
std::vector<double> parse_list(const std::string& s);

// key = value lines, '#' comments, [section] headers used only for grouping.
RunManifest parse_manifest(const std::string& text);
RunManifest load_manifest(const std::string& path);
// Applies one key; throws ConfigError on unknown keys or bad values.
void apply_key(RunManifest& m, const std::string& key, const std::string& value);

// A rectangular result: column names, rows of formatted cells, and one JSON object per row.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> summary;
};

std::string format_number(double v);
std::string to_csv(const Table& t, const std::vector<std::pair<std::string, std::string>>& header);
std::string to_json(const Table& t, const std::vector<std::pair<std::string, std::string>>& header);

// Parsed CSV (comment lines skipped) for chart rendering; throws NumericalError(FormatError).
struct CsvData {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::size_t column(const std::string& name) const;
};
CsvData parse_csv(const std::string& text);

std::string render_heatmap(const CsvData& d, const std::string& x, const std::string& y, const std::string& v, const std::string& title);
std::string render_lines(const CsvData& d, const std::string& x, const std::string& y, const std::string& series, const std::string& title);

// Runs the command to completion, then writes every artifact. Returns the table.
Table execute(const RunManifest& m);
// Full run with output: writes files or prints CSV, prints the summary to `log`. Returns the exit status.
int run(const RunManifest& m, std::ostream& out, std::ostream& log);

} // namespace pierbeam::cli
