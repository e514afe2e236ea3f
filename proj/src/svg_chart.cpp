#include "pierbeam/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace pierbeam::cli {

namespace {

constexpr double W = 640, H = 480, ML = 70, MR = 90, MT = 40, MB = 60;

std::string f2(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// piecewise-linear blue to yellow ramp
std::string color(double t)
{
    static constexpr std::array<std::array<double, 3>, 5> stops{{{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
    if (!std::isfinite(t)) return "#bbbbbb";
    t = std::clamp(t, 0.0, 1.0) * 4;
    const int i = std::min(3, int(t));
    const double f = t - i;
    char buf[8];
    int rgb[3];
    for (int c = 0; c < 3; ++c) rgb[c] = int(std::lround(stops[std::size_t(i)][std::size_t(c)] * (1 - f) + stops[std::size_t(i) + 1][std::size_t(c)] * f));
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string o;
    for (char c : s) {
        if (c == '<') o += "&lt;";
        else if (c == '>') o += "&gt;";
        else if (c == '&') o += "&amp;";
        else o += c;
    }
    return o;
}

void open_svg(std::ostringstream& os, const std::string& title)
{
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << f2(W / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" << escape(title) << "</text>\n";
}

void axes(std::ostringstream& os, double x0, double x1, double y0, double y1, const std::string& xl, const std::string& yl)
{
    const double pw = W - ML - MR, ph = H - MT - MB;
    os << "<rect x=\"" << ML << "\" y=\"" << MT << "\" width=\"" << pw << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = ML + pw * i / 4, fy = MT + ph * (1 - i / 4.0);
        os << "<text x=\"" << f2(fx) << "\" y=\"" << f2(H - MB + 18) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
           << label(x0 + (x1 - x0) * i / 4) << "</text>\n";
        os << "<text x=\"" << f2(ML - 6) << "\" y=\"" << f2(fy + 4) << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
           << label(y0 + (y1 - y0) * i / 4) << "</text>\n";
    }
    os << "<text x=\"" << f2(ML + pw / 2) << "\" y=\"" << f2(H - 16) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(xl)
       << "</text>\n";
    os << "<text x=\"18\" y=\"" << f2(MT + ph / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
       << f2(MT + ph / 2) << ")\">" << escape(yl) << "</text>\n";
}

std::vector<double> unique_sorted(const CsvData& d, std::size_t c)
{
    std::vector<double> v;
    for (const auto& r : d.rows)
        if (std::isfinite(r[c])) v.push_back(r[c]);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

} // namespace

std::string render_heatmap(const CsvData& d, const std::string& x, const std::string& y, const std::string& v, const std::string& title)
{
    const std::size_t cx = d.column(x), cy = d.column(y), cv = d.column(v);
    const auto xs = unique_sorted(d, cx), ys = unique_sorted(d, cy);
    if (xs.empty() || ys.empty()) throw NumericalError(ErrorCode::FormatError, "no numeric grid points");
    double vmin = INFINITY, vmax = -INFINITY;
    for (const auto& r : d.rows)
        if (std::isfinite(r[cv])) {
            vmin = std::min(vmin, r[cv]);
            vmax = std::max(vmax, r[cv]);
        }
    const double pw = W - ML - MR, ph = H - MT - MB;
    const double cw = pw / double(xs.size()), ch = ph / double(ys.size());
    std::ostringstream os;
    open_svg(os, title);
    for (const auto& r : d.rows) {
        if (!std::isfinite(r[cx]) || !std::isfinite(r[cy])) continue;
        const auto ix = std::size_t(std::lower_bound(xs.begin(), xs.end(), r[cx]) - xs.begin());
        const auto iy = std::size_t(std::lower_bound(ys.begin(), ys.end(), r[cy]) - ys.begin());
        const double t = vmax > vmin ? (r[cv] - vmin) / (vmax - vmin) : 0.5;
        os << "<rect x=\"" << f2(ML + cw * double(ix)) << "\" y=\"" << f2(MT + ph - ch * double(iy + 1)) << "\" width=\"" << f2(cw) << "\" height=\""
           << f2(ch) << "\" fill=\"" << color(t) << "\"/>\n";
    }
    axes(os, xs.front(), xs.back(), ys.front(), ys.back(), x, y);
    // legend
    for (int i = 0; i < 10; ++i)
        os << "<rect x=\"" << f2(W - MR + 20) << "\" y=\"" << f2(MT + ph * (9 - i) / 10.0) << "\" width=\"16\" height=\"" << f2(ph / 10) << "\" fill=\""
           << color((i + 0.5) / 10) << "\"/>\n";
    const double lo = std::isfinite(vmin) ? vmin : 0, hi = std::isfinite(vmax) ? vmax : 0;
    os << "<text x=\"" << f2(W - MR + 40) << "\" y=\"" << f2(MT + 10) << "\" font-family=\"sans-serif\" font-size=\"11\">" << label(hi) << "</text>\n";
    os << "<text x=\"" << f2(W - MR + 40) << "\" y=\"" << f2(MT + ph) << "\" font-family=\"sans-serif\" font-size=\"11\">" << label(lo) << "</text>\n";
    os << "<text x=\"" << f2(W - MR + 28) << "\" y=\"" << f2(MT - 8) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << escape(v)
       << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

std::string render_lines(const CsvData& d, const std::string& x, const std::string& y, const std::string& series, const std::string& title)
{
    const std::size_t cx = d.column(x), cy = d.column(y);
    const bool grouped = !series.empty();
    const std::size_t cs = grouped ? d.column(series) : 0;
    std::map<double, std::vector<std::pair<double, double>>> lines;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& r : d.rows) {
        if (!std::isfinite(r[cx]) || !std::isfinite(r[cy])) continue;
        lines[grouped ? r[cs] : 0.0].emplace_back(r[cx], r[cy]);
        x0 = std::min(x0, r[cx]);
        x1 = std::max(x1, r[cx]);
        y0 = std::min(y0, r[cy]);
        y1 = std::max(y1, r[cy]);
    }
    if (lines.empty()) throw NumericalError(ErrorCode::FormatError, "no finite points to plot");
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const double pw = W - ML - MR, ph = H - MT - MB;
    std::ostringstream os;
    open_svg(os, title);
    axes(os, x0, x1, y0, y1, x, y);
    std::size_t k = 0;
    for (auto& [key, pts] : lines) {
        std::sort(pts.begin(), pts.end());
        const std::string col = color(lines.size() > 1 ? double(k) / double(lines.size() - 1) : 0.3);
        os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i)
            os << (i ? " " : "") << f2(ML + pw * (pts[i].first - x0) / (x1 - x0)) << "," << f2(MT + ph * (1 - (pts[i].second - y0) / (y1 - y0)));
        os << "\"/>\n";
        if (grouped)
            os << "<text x=\"" << f2(W - MR + 8) << "\" y=\"" << f2(MT + 14 * double(k + 1)) << "\" fill=\"" << col
               << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(series) << "=" << label(key) << "</text>\n";
        ++k;
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace pierbeam::cli
