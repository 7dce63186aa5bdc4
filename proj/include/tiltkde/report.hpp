#pragma once

#include <string>
#include <vector>

#include "tiltkde/estimator.hpp"
#include "tiltkde/rate_lab.hpp"
#include "tiltkde/tilt.hpp"

namespace tiltkde::report {

//! 17 significant digits; guarantees the printed decimal parses back to the
//! same double.
std::string format_double(double value);

//! One numeric literal per line; '#' starts a comment, blank lines ignored.
std::vector<double> read_data_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

struct EstimateMeta {
    std::size_t n = 0;
    int s = 0;
    std::string kernel;
    std::string tilt_mode;
};

std::string estimate_csv(const EstimateResult& result, const EstimateMeta& meta);
std::string weights_csv(const TiltWeights& weights, const std::vector<double>& sample,
                        const std::vector<double>& g_values);
std::string bias_table_csv(const std::vector<BiasReport>& reports);

std::string rate_rows_csv(const RateReport& report);
std::string rate_report_json(const RateReport& report);
//! Self-contained log-log scatter (one marker per n) with the fitted and
//! theoretical slope lines.
std::string rate_report_svg(const RateReport& report);

} // namespace tiltkde::report
