#include "traytilt/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "traytilt/experiment.hpp"

namespace traytilt {

namespace {

constexpr double kWidth = 820.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 20.0;
constexpr double kTop = 36.0;
constexpr double kBottom = 52.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// A tick spacing of 1, 2, 5, or 10 units per decade that yields <= 11 ticks.
double nice_step(double range) {
    if (range <= 0.0) return 1.0;
    const double raw = range / 10.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double mult : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * mult >= raw) return mag * mult;
    }
    return mag * 10.0;
}

}  // namespace

std::string render_trend_svg(const std::vector<std::vector<double>>& trends,
                             const std::string& title) {
    if (trends.empty() || trends.front().empty()) {
        throw std::invalid_argument("plot needs at least one non-empty trend");
    }
    const std::size_t len = trends.front().size();
    for (const auto& t : trends) {
        if (t.size() != len) {
            throw std::invalid_argument("plot trends must share a length");
        }
    }

    double y_max = 0.0;
    for (const auto& t : trends) {
        for (double v : t) y_max = std::max(y_max, v);
    }
    y_max = std::max(1.0, std::ceil(y_max * 2.0) / 2.0);  // headroom, 0.5 steps

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const double x_scale = plot_w / static_cast<double>(len - 1 ? len - 1 : 1);
    const auto px = [&](std::size_t step) {
        return kLeft + x_scale * static_cast<double>(step);
    };
    const auto py = [&](double h) { return kTop + plot_h * (1.0 - h / y_max); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
           "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) +
           " " + num(kHeight) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // IQR band behind everything else.
    if (trends.size() >= 4) {
        const AggregateTrend agg = aggregate_trends(trends);
        std::string pts;
        for (std::size_t i = 0; i < len; ++i) {
            pts += num(px(i)) + "," + num(py(agg.q75[i])) + " ";
        }
        for (std::size_t i = len; i-- > 0;) {
            pts += num(px(i)) + "," + num(py(agg.q25[i])) + " ";
        }
        svg += "<polygon points=\"" + pts +
               "\" fill=\"#aaccee\" fill-opacity=\"0.55\" stroke=\"none\"/>\n";
    }

    // Axes and grid.
    svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop + plot_h) +
           "\" x2=\"" + num(kLeft + plot_w) + "\" y2=\"" + num(kTop + plot_h) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" +
           num(kLeft) + "\" y2=\"" + num(kTop + plot_h) +
           "\" stroke=\"black\"/>\n";

    const double x_step = nice_step(static_cast<double>(len - 1));
    for (double xv = 0.0; xv <= static_cast<double>(len - 1) + 1e-9;
         xv += x_step) {
        const double x = kLeft + x_scale * xv;
        svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(kTop + plot_h) +
               "\" x2=\"" + num(x) + "\" y2=\"" + num(kTop + plot_h + 5) +
               "\" stroke=\"black\"/>\n";
        char label[16];
        std::snprintf(label, sizeof(label), "%g", xv);
        svg += "<text x=\"" + num(x) + "\" y=\"" + num(kTop + plot_h + 20) +
               "\" font-size=\"12\" text-anchor=\"middle\">" + label +
               "</text>\n";
    }
    const double y_step = nice_step(y_max);
    for (double yv = 0.0; yv <= y_max + 1e-9; yv += y_step) {
        const double y = py(yv);
        svg += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(y) +
               "\" x2=\"" + num(kLeft) + "\" y2=\"" + num(y) +
               "\" stroke=\"black\"/>\n";
        char label[16];
        std::snprintf(label, sizeof(label), "%g", yv);
        svg += "<text x=\"" + num(kLeft - 9) + "\" y=\"" + num(y + 4) +
               "\" font-size=\"12\" text-anchor=\"end\">" + label + "</text>\n";
    }
    svg += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" +
           num(kHeight - 14) +
           "\" font-size=\"14\" text-anchor=\"middle\">tilt number</text>\n";
    svg += "<text x=\"16\" y=\"" + num(kTop + plot_h / 2) +
           "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 "
           "16 " +
           num(kTop + plot_h / 2) + ")\">entropy (bits)</text>\n";
    if (!title.empty()) {
        svg += "<text x=\"" + num(kLeft + plot_w / 2) +
               "\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">" + title +
               "</text>\n";
    }

    // Individual trends.
    for (const auto& t : trends) {
        std::string pts;
        for (std::size_t i = 0; i < len; ++i) {
            pts += num(px(i)) + "," + num(py(t[i])) + " ";
        }
        svg += "<polyline points=\"" + pts +
               "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\" "
               "stroke-opacity=\"0.35\"/>\n";
    }

    // Bold mean line on top.
    {
        std::string pts;
        for (std::size_t i = 0; i < len; ++i) {
            double sum = 0.0;
            for (const auto& t : trends) sum += t[i];
            pts += num(px(i)) + "," +
                   num(py(sum / static_cast<double>(trends.size()))) + " ";
        }
        svg += "<polyline points=\"" + pts +
               "\" fill=\"none\" stroke=\"#cc2222\" stroke-width=\"2.5\"/>\n";
    }

    svg += "</svg>\n";
    return svg;
}

}  // namespace traytilt
