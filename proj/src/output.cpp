#include "pierbeam/cli.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace pierbeam::cli {

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string to_csv(const Table& t, const std::vector<std::pair<std::string, std::string>>& header)
{
    std::ostringstream os;
    os << "# pierbeam\n";
    for (const auto& [k, v] : header) os << "# " << k << " = " << v << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
    return os.str();
}

namespace {
nlohmann::ordered_json cell_value(const std::string& s)
{
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (!s.empty() && ec == std::errc() && p == s.data() + s.size()) return v;
    // JSON has no infinities; keep them as strings like the CSV does
    return s;
}
} // namespace

std::string to_json(const Table& t, const std::vector<std::pair<std::string, std::string>>& header)
{
    nlohmann::ordered_json doc;
    doc["header"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : header) doc["header"][k] = v;
    doc["cells"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json cell;
        for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) cell[t.columns[i]] = cell_value(row[i]);
        doc["cells"].push_back(cell);
    }
    doc["summary"] = t.summary;
    return doc.dump(2) + "\n";
}

std::size_t CsvData::column(const std::string& name) const
{
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw NumericalError(ErrorCode::FormatError, "missing column '" + name + "'");
}

CsvData parse_csv(const std::string& text)
{
    CsvData d;
    std::stringstream ss(text);
    std::size_t lineno = 0;
    auto split = [](const std::string& line) {
        std::vector<std::string> out;
        std::stringstream ls(line);
        for (std::string item; std::getline(ls, item, ',');) out.push_back(item);
        if (!line.empty() && line.back() == ',') out.emplace_back();
        return out;
    };
    for (std::string line; std::getline(ss, line);) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto cells = split(line);
        if (d.columns.empty()) {
            d.columns = cells;
            continue;
        }
        if (cells.size() != d.columns.size())
            throw NumericalError(ErrorCode::FormatError, "line " + std::to_string(lineno) + ": expected " + std::to_string(d.columns.size()) + " fields");
        std::vector<double> row;
        for (const auto& c : cells) {
            if (c == "inf") row.push_back(INFINITY);
            else if (c == "-inf") row.push_back(-INFINITY);
            else if (c == "nan") row.push_back(NAN);
            else {
                double v = 0;
                auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
                // non-numeric labels map to NaN; charts skip them
                row.push_back(ec == std::errc() && p == c.data() + c.size() ? v : NAN);
            }
        }
        d.rows.push_back(std::move(row));
    }
    if (d.columns.empty()) throw NumericalError(ErrorCode::FormatError, "no header line");
    return d;
}

} // namespace pierbeam::cli
