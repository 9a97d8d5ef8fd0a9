#include "incadet/svgplot.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace incadet {

namespace {

constexpr double kWidth = 520, kHeight = 400;
constexpr double kLeft = 60, kTop = 30, kPlotW = 430, kPlotH = 310;

double map_x(double u) { return kLeft + kPlotW * u; }
double map_y(double v) { return kTop + kPlotH * (1.0 - v); }

class Chart {
  public:
    Chart(const std::string& title, const std::string& x_label, const std::string& y_label) {
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
             << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
        out_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out_ << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" "
             << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
        // frame + gridlines + tick labels on a 0..1 grid
        for (int i = 0; i <= 4; ++i) {
            const double f = i / 4.0;
            out_ << "<line x1=\"" << map_x(f) << "\" y1=\"" << map_y(0) << "\" x2=\"" << map_x(f)
                 << "\" y2=\"" << map_y(1) << "\" stroke=\"#dddddd\"/>\n";
            out_ << "<line x1=\"" << map_x(0) << "\" y1=\"" << map_y(f) << "\" x2=\"" << map_x(1)
                 << "\" y2=\"" << map_y(f) << "\" stroke=\"#dddddd\"/>\n";
            out_ << "<text x=\"" << map_x(f) << "\" y=\"" << map_y(0) + 18
                 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
                 << tick(f) << "</text>\n";
            out_ << "<text x=\"" << map_x(0) - 8 << "\" y=\"" << map_y(f) + 4
                 << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick(f)
                 << "</text>\n";
        }
        out_ << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kPlotW
             << "\" height=\"" << kPlotH << "\" fill=\"none\" stroke=\"black\"/>\n";
        out_ << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 10
             << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
             << "</text>\n";
        out_ << "<text x=\"16\" y=\"" << kTop + kPlotH / 2
             << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
             << "transform=\"rotate(-90 16 " << kTop + kPlotH / 2 << ")\">" << y_label
             << "</text>\n";
    }

    void polyline(const std::vector<CurvePoint>& points, const std::string& color,
                  const std::string& dash = "") {
        out_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
        if (!dash.empty()) out_ << " stroke-dasharray=\"" << dash << "\"";
        out_ << " points=\"";
        for (const CurvePoint& p : points) out_ << map_x(p.x) << "," << map_y(p.y) << " ";
        out_ << "\"/>\n";
    }

    void shade(double x_from, double x_to) {
        out_ << "<rect x=\"" << map_x(x_from) << "\" y=\"" << kTop << "\" width=\""
             << map_x(x_to) - map_x(x_from) << "\" height=\"" << kPlotH
             << "\" fill=\"#ffcccc\" opacity=\"0.6\"/>\n";
    }

    std::string finish() {
        out_ << "</svg>\n";
        return out_.str();
    }

  private:
    static std::string tick(double f) {
        std::ostringstream s;
        s << f;
        return s.str();
    }

    std::ostringstream out_;
};

std::string format_auc(const std::optional<double>& auc) {
    if (!auc) return "n/a";
    std::ostringstream s;
    s.precision(4);
    s << std::fixed << *auc;
    return s.str();
}

}  // namespace

std::string roc_svg(const MetricsReport& report) {
    const AucResult auc = roc_prc_auc(report.scores, report.labels);
    Chart chart("ROC curve (AUC = " + format_auc(auc.roc) + ")", "false positive rate",
                "true positive rate");
    chart.polyline({{0.0, 0.0}, {1.0, 1.0}}, "#999999", "4,4");
    chart.polyline(roc_curve(report.scores, report.labels), "#1f6fb3");
    return chart.finish();
}

std::string prc_svg(const MetricsReport& report) {
    const AucResult auc = roc_prc_auc(report.scores, report.labels);
    Chart chart("Precision-recall curve (AUC = " + format_auc(auc.prc) + ")", "recall",
                "precision");
    chart.polyline(prc_curve(report.scores, report.labels), "#b33a1f");
    return chart.finish();
}

std::string timeline_svg(const MetricsReport& report, double threshold) {
    if (report.scores.empty()) throw std::invalid_argument("timeline needs at least one score");
    const std::size_t n = report.scores.size();
    Chart chart("Per-window anomaly scores", "window", "score");

    auto frac = [n](std::size_t i) {
        return n == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(n - 1);
    };
    std::size_t i = 0;
    while (i < report.labels.size()) {
        if (report.labels[i] == 1) {
            std::size_t j = i;
            while (j + 1 < report.labels.size() && report.labels[j + 1] == 1) ++j;
            chart.shade(frac(i), frac(j));
            i = j + 1;
        } else {
            ++i;
        }
    }
    chart.polyline({{0.0, threshold}, {1.0, threshold}}, "#999999", "4,4");
    std::vector<CurvePoint> line;
    for (std::size_t k = 0; k < n; ++k) {
        line.push_back({frac(k), std::clamp(report.scores[k], 0.0, 1.0)});
    }
    chart.polyline(line, "#1f6fb3");
    return chart.finish();
}

}  // namespace incadet
