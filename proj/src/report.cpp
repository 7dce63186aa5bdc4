#include "tiltkde/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "tiltkde/errors.hpp"
#include "tiltkde/summation.hpp"

namespace tiltkde::report {

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

namespace {

std::string format_fixed3(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.3f", value);
    return buffer;
}

} // namespace

std::vector<double> read_data_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open data file '" + path + "'");
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        const std::string token = line.substr(first, last - first + 1);
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size() || !std::isfinite(v))
            throw InvalidInput("data file '" + path + "' line " + std::to_string(line_no) +
                               ": not a numeric literal: '" + token + "'");
        values.push_back(v);
    }
    if (values.empty()) throw InvalidInput("data file '" + path + "' contains no values");
    return values;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + path + "'");
}

std::string estimate_csv(const EstimateResult& result, const EstimateMeta& meta) {
    std::ostringstream out;
    out << "x,fhat_s,h,delta,n,s,kernel,tilt_mode\n";
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        out << format_double(result.points[i]) << ',' << format_double(result.values[i]) << ','
            << format_double(result.h_used) << ',' << format_double(result.delta) << ','
            << meta.n << ',' << meta.s << ',' << meta.kernel << ',' << meta.tilt_mode << '\n';
    }
    return out.str();
}

std::string weights_csv(const TiltWeights& weights, const std::vector<double>& sample,
                        const std::vector<double>& g_values) {
    std::ostringstream out;
    out << "index,x,g,raw,weight\n";
    for (std::size_t i = 0; i < weights.p.size(); ++i) {
        out << i << ',' << format_double(sample[i]) << ',' << format_double(g_values[i]) << ','
            << format_double(weights.raw[i]) << ',' << format_double(weights.p[i]) << '\n';
    }
    return out.str();
}

std::string bias_table_csv(const std::vector<BiasReport>& reports) {
    std::ostringstream out;
    out << "h,x,expected_value,truth,bias,bias_over_h2\n";
    for (const auto& r : reports) {
        out << format_double(r.h) << ',' << format_double(r.x) << ','
            << format_double(r.expected_value) << ',' << format_double(r.truth) << ','
            << format_double(r.bias) << ',' << format_double(r.bias_over_h2) << '\n';
    }
    return out.str();
}

std::string rate_rows_csv(const RateReport& report) {
    std::ostringstream out;
    out << "n,x,h,error,std_error,excluded\n";
    for (const auto& row : report.rows) {
        out << row.n << ',' << format_double(row.x) << ',' << format_double(row.h) << ','
            << format_double(row.error) << ',' << format_double(row.std_error) << ','
            << row.excluded << '\n';
    }
    return out.str();
}

std::string rate_report_json(const RateReport& report) {
    nlohmann::ordered_json doc;
    doc["fitted_slope"] = report.fitted_slope;
    doc["slope_stderr"] = report.slope_std_error;
    doc["theoretical_slope"] = report.theoretical_slope;
    doc["tolerance"] = report.tolerance;
    doc["pass"] = report.pass;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : report.rows) {
        nlohmann::ordered_json j;
        j["n"] = row.n;
        j["x"] = row.x;
        j["h"] = row.h;
        j["error"] = row.error;
        j["std_error"] = row.std_error;
        j["excluded"] = row.excluded;
        doc["rows"].push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

std::string rate_report_svg(const RateReport& report) {
    if (report.rows.empty()) throw InvalidInput("cannot plot an empty rate report");
    // Pool rows per n: mean of log10(error) across eval points.
    std::map<std::size_t, std::pair<double, std::size_t>> pooled;
    for (const auto& row : report.rows) {
        auto& slot = pooled[row.n];
        slot.first += std::log10(std::max(row.error, 1e-300));
        slot.second += 1;
    }
    std::vector<std::pair<double, double>> points; // (log10 n, pooled log10 error)
    for (const auto& [n, slot] : pooled)
        points.emplace_back(std::log10(static_cast<double>(n)),
                            slot.first / static_cast<double>(slot.second));

    const double width = 720.0, height = 540.0;
    const double left = 80.0, right = 30.0, top = 40.0, bottom = 70.0;
    double x_lo = points.front().first, x_hi = points.back().first;
    double y_lo = points.front().second, y_hi = points.front().second;
    for (const auto& [x, y] : points) {
        y_lo = std::min(y_lo, y);
        y_hi = std::max(y_hi, y);
    }
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    const double y_pad = 0.1 * std::max(y_hi - y_lo, 0.2);
    y_lo -= y_pad;
    y_hi += y_pad;

    const auto px = [&](double x) {
        return left + (x - x_lo) / (x_hi - x_lo) * (width - left - right);
    };
    const auto py = [&](double y) {
        return height - bottom - (y - y_lo) / (y_hi - y_lo) * (height - top - bottom);
    };

    // Anchor both reference lines at the centroid of the pooled points.
    double cx = 0.0, cy = 0.0;
    for (const auto& [x, y] : points) {
        cx += x;
        cy += y;
    }
    cx /= static_cast<double>(points.size());
    cy /= static_cast<double>(points.size());
    // log10(error) vs log10(n) has the same slope as the natural-log fit
    const auto line_y = [&](double slope, double x) { return cy + slope * (x - cx); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    svg << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    svg << "  <line x1=\"" << format_fixed3(left) << "\" y1=\"" << format_fixed3(height - bottom)
        << "\" x2=\"" << format_fixed3(width - right) << "\" y2=\""
        << format_fixed3(height - bottom) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg << "  <line x1=\"" << format_fixed3(left) << "\" y1=\"" << format_fixed3(top)
        << "\" x2=\"" << format_fixed3(left) << "\" y2=\"" << format_fixed3(height - bottom)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

    for (const auto& [n, slot] : pooled) {
        const double gx = px(std::log10(static_cast<double>(n)));
        svg << "  <line x1=\"" << format_fixed3(gx) << "\" y1=\"" << format_fixed3(height - bottom)
            << "\" x2=\"" << format_fixed3(gx) << "\" y2=\"" << format_fixed3(height - bottom + 6)
            << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        svg << "  <text x=\"" << format_fixed3(gx) << "\" y=\"" << format_fixed3(height - bottom + 22)
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" << n
            << "</text>\n";
    }
    for (int t = 0; t <= 4; ++t) {
        const double y = y_lo + (y_hi - y_lo) * t / 4.0;
        svg << "  <text x=\"" << format_fixed3(left - 8) << "\" y=\"" << format_fixed3(py(y) + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">1e"
            << format_fixed3(y) << "</text>\n";
    }
    svg << "  <text x=\"" << format_fixed3((left + width - right) / 2) << "\" y=\""
        << format_fixed3(height - 18)
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">n (log scale)"
           "</text>\n";
    svg << "  <text x=\"18\" y=\"" << format_fixed3((top + height - bottom) / 2)
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 18 "
        << format_fixed3((top + height - bottom) / 2) << ")\">error (log scale)</text>\n";

    svg << "  <line x1=\"" << format_fixed3(px(x_lo)) << "\" y1=\""
        << format_fixed3(py(line_y(report.fitted_slope, x_lo))) << "\" x2=\""
        << format_fixed3(px(x_hi)) << "\" y2=\""
        << format_fixed3(py(line_y(report.fitted_slope, x_hi)))
        << "\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
    svg << "  <line x1=\"" << format_fixed3(px(x_lo)) << "\" y1=\""
        << format_fixed3(py(line_y(report.theoretical_slope, x_lo))) << "\" x2=\""
        << format_fixed3(px(x_hi)) << "\" y2=\""
        << format_fixed3(py(line_y(report.theoretical_slope, x_hi)))
        << "\" stroke=\"#2ca02c\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";

    for (const auto& [x, y] : points)
        svg << "  <circle cx=\"" << format_fixed3(px(x)) << "\" cy=\"" << format_fixed3(py(y))
            << "\" r=\"4\" fill=\"#1f77b4\"/>\n";

    svg << "  <text x=\"" << format_fixed3(width - right - 10) << "\" y=\""
        << format_fixed3(top + 16)
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\" fill=\"#d62728\">"
           "fitted slope "
        << format_fixed3(report.fitted_slope) << "</text>\n";
    svg << "  <text x=\"" << format_fixed3(width - right - 10) << "\" y=\""
        << format_fixed3(top + 34)
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\" fill=\"#2ca02c\">"
           "theoretical slope "
        << format_fixed3(report.theoretical_slope) << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

} // namespace tiltkde::report
