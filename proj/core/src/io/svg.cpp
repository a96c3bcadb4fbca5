#include "flowrep/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace flowrep {

namespace {

const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                          "#59a14f", "#edc948", "#b07aa1", "#9c755f"};

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string bar_chart_svg(const std::string& title, const std::vector<BarDatum>& data) {
    std::vector<std::string> groups, series;
    for (const auto& d : data) {
        if (std::find(groups.begin(), groups.end(), d.group) == groups.end()) {
            groups.push_back(d.group);
        }
        if (std::find(series.begin(), series.end(), d.series) == series.end()) {
            series.push_back(d.series);
        }
    }

    double lo = 0.0, hi = 0.0;
    for (const auto& d : data) {
        lo = std::min(lo, d.value - d.error);
        hi = std::max(hi, d.value + d.error);
    }
    if (hi - lo < 1e-9) hi = lo + 1.0;
    const double pad = 0.1 * (hi - lo);
    lo -= pad;
    hi += pad;

    const double margin_left = 60, margin_top = 50, margin_bottom = 110, margin_right = 20;
    const double plot_h = 320;
    const double group_w = std::max<double>(26.0 * static_cast<double>(series.size()) + 18.0, 60.0);
    const double plot_w = group_w * static_cast<double>(groups.size());
    const double width = margin_left + plot_w + margin_right;
    const double height = margin_top + plot_h + margin_bottom;

    auto y_of = [&](double v) { return margin_top + (hi - v) / (hi - lo) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" font-family=\"sans-serif\">\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << xml_escape(title) << "</text>\n";

    // Horizontal gridlines at ticks.
    const double tick = std::pow(10.0, std::floor(std::log10((hi - lo) / 4.0)));
    double step = tick;
    while ((hi - lo) / step > 8.0) step *= 2.0;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12; v += step) {
        const double y = y_of(v);
        svg << "<line x1=\"" << margin_left << "\" y1=\"" << y << "\" x2=\""
            << margin_left + plot_w << "\" y2=\"" << y
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        char label[32];
        std::snprintf(label, sizeof(label), "%.3g", v);
        svg << "<text x=\"" << margin_left - 6 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << label << "</text>\n";
    }
    // Zero line.
    svg << "<line x1=\"" << margin_left << "\" y1=\"" << y_of(0.0) << "\" x2=\""
        << margin_left + plot_w << "\" y2=\"" << y_of(0.0)
        << "\" stroke=\"#555555\" stroke-width=\"1.2\"/>\n";

    const double bar_w = (group_w - 18.0) / static_cast<double>(series.size());
    for (size_t gi = 0; gi < groups.size(); ++gi) {
        const double gx = margin_left + group_w * static_cast<double>(gi) + 9.0;
        for (size_t si = 0; si < series.size(); ++si) {
            const BarDatum* datum = nullptr;
            for (const auto& d : data) {
                if (d.group == groups[gi] && d.series == series[si]) {
                    datum = &d;
                    break;
                }
            }
            if (datum == nullptr) continue;
            const double x = gx + bar_w * static_cast<double>(si);
            const double y0 = y_of(0.0);
            const double y1 = y_of(datum->value);
            const double top = std::min(y0, y1);
            const double h = std::abs(y0 - y1);
            svg << "<rect x=\"" << x << "\" y=\"" << top << "\" width=\"" << bar_w - 2
                << "\" height=\"" << h << "\" fill=\""
                << kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))] << "\"/>\n";
            if (datum->error > 0.0) {
                const double cx = x + (bar_w - 2) / 2.0;
                const double ylo = y_of(datum->value - datum->error);
                const double yhi = y_of(datum->value + datum->error);
                svg << "<line x1=\"" << cx << "\" y1=\"" << yhi << "\" x2=\"" << cx
                    << "\" y2=\"" << ylo << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
                svg << "<line x1=\"" << cx - 3 << "\" y1=\"" << yhi << "\" x2=\"" << cx + 3
                    << "\" y2=\"" << yhi << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
                svg << "<line x1=\"" << cx - 3 << "\" y1=\"" << ylo << "\" x2=\"" << cx + 3
                    << "\" y2=\"" << ylo << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
            }
        }
        svg << "<text x=\"" << gx + (group_w - 18.0) / 2.0 << "\" y=\""
            << margin_top + plot_h + 14 << "\" text-anchor=\"end\" font-size=\"10\" "
            << "transform=\"rotate(-40 " << gx + (group_w - 18.0) / 2.0 << ' '
            << margin_top + plot_h + 14 << ")\">" << xml_escape(groups[gi]) << "</text>\n";
    }

    // Legend.
    for (size_t si = 0; si < series.size(); ++si) {
        const double lx = margin_left + 110.0 * static_cast<double>(si);
        const double ly = height - 18.0;
        svg << "<rect x=\"" << lx << "\" y=\"" << ly - 10 << "\" width=\"12\" height=\"12\" fill=\""
            << kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))] << "\"/>\n";
        svg << "<text x=\"" << lx + 16 << "\" y=\"" << ly << "\" font-size=\"11\">"
            << xml_escape(series[si]) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace flowrep
