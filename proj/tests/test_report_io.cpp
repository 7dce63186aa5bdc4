#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <unistd.h>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tiltkde/errors.hpp"
#include "tiltkde/report.hpp"

using namespace tiltkde;

namespace {

RateReport sample_report() {
    RateReport r;
    r.theoretical_slope = theoretical_slope(2, 0);
    r.tolerance = 0.12;
    r.fitted_slope = -0.3871234567890123;
    r.slope_std_error = 0.0123456789012345;
    r.pass = true;
    const std::vector<std::size_t> n_grid{512, 1024, 2048, 4096};
    for (std::size_t n : n_grid)
        for (double x : {0.0, 0.5, 1.0}) {
            RateRow row;
            row.n = n;
            row.x = x;
            row.h = 1.0 / static_cast<double>(n);
            row.error = 0.001 + 17.0 / static_cast<double>(n) + x / 3.0;
            row.std_error = row.error / 9.0;
            row.excluded = 0;
            r.rows.push_back(row);
        }
    r.point_slopes = {{0.0, -0.39, 0.01}, {0.5, -0.385, 0.011}, {1.0, -0.386, 0.012}};
    return r;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

std::string temp_path(const std::string& stem) {
    return std::string("/tmp/tiltkde_test_") + stem + "_" + std::to_string(::getpid());
}

} // namespace

TEST_SUITE("report_io") {

TEST_CASE("doubles round-trip through 17 significant digits") {
    const std::vector<double> values{0.1,       -0.4,        1.0 / 3.0,     1e-300,
                                     2.5e300,   0.0,         -1.40625,      3.141592653589793,
                                     1e17 + 1., 0.2999999999999999889, 123456.789012345678};
    for (double v : values) {
        const std::string text = report::format_double(v);
        CHECK(std::strtod(text.c_str(), nullptr) == v);
    }
}

TEST_CASE("rate csv header and exact round trip") {
    const RateReport r = sample_report();
    const std::string csv = report::rate_rows_csv(r);
    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "n,x,h,error,std_error,excluded");
    std::size_t row_index = 0;
    while (std::getline(in, line)) {
        std::stringstream fields(line);
        std::string field;
        std::vector<std::string> cols;
        while (std::getline(fields, field, ',')) cols.push_back(field);
        REQUIRE(cols.size() == 6);
        CHECK(static_cast<std::size_t>(std::strtoull(cols[0].c_str(), nullptr, 10)) ==
              r.rows[row_index].n);
        CHECK(std::strtod(cols[1].c_str(), nullptr) == r.rows[row_index].x);
        CHECK(std::strtod(cols[2].c_str(), nullptr) == r.rows[row_index].h);
        CHECK(std::strtod(cols[3].c_str(), nullptr) == r.rows[row_index].error);
        CHECK(std::strtod(cols[4].c_str(), nullptr) == r.rows[row_index].std_error);
        ++row_index;
    }
    CHECK(row_index == r.rows.size());
    CHECK(report::rate_rows_csv(r) == csv); // serialization is deterministic
}

TEST_CASE("json report carries the documented keys") {
    const RateReport r = sample_report();
    const std::string text = report::rate_report_json(r);
    const auto doc = nlohmann::json::parse(text);
    REQUIRE(doc.contains("fitted_slope"));
    REQUIRE(doc.contains("slope_stderr"));
    REQUIRE(doc.contains("theoretical_slope"));
    REQUIRE(doc.contains("tolerance"));
    REQUIRE(doc.contains("pass"));
    REQUIRE(doc.contains("rows"));
    CHECK(doc["theoretical_slope"].get<double>() == -0.4);
    CHECK(doc["fitted_slope"].get<double>() == r.fitted_slope);
    CHECK(doc["pass"].get<bool>() == true);
    CHECK(doc["rows"].size() == r.rows.size());
    CHECK(doc["rows"][0]["n"].get<std::size_t>() == 512);
    CHECK(doc["rows"][0]["error"].get<double>() == r.rows[0].error);
}

TEST_CASE("svg has one marker per sample size and no external references") {
    const RateReport r = sample_report();
    const std::string svg = report::rate_report_svg(r);
    CHECK(count_occurrences(svg, "<circle") == 4); // one per n in the grid
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("href") == std::string::npos);
    CHECK(svg.find("url(") == std::string::npos);
    CHECK(svg.find("fitted slope") != std::string::npos);
    CHECK(report::rate_report_svg(r) == svg);
}

TEST_CASE("estimate, weights, and bias tables carry their headers") {
    EstimateResult est;
    est.points = {0.0, 0.5};
    est.values = {0.39, 0.35};
    est.h_used = 0.25;
    est.delta = 0.001;
    report::EstimateMeta meta;
    meta.n = 100;
    meta.s = 0;
    meta.kernel = "epanechnikov";
    meta.tilt_mode = "oracle";
    const std::string est_csv = report::estimate_csv(est, meta);
    CHECK(est_csv.rfind("x,fhat_s,h,delta,n,s,kernel,tilt_mode\n", 0) == 0);
    CHECK(count_occurrences(est_csv, "\n") == 3);
    CHECK(est_csv.find("epanechnikov,oracle") != std::string::npos);

    TiltWeights w;
    w.p = {0.6, 0.4};
    w.raw = {0.55, 0.45};
    w.delta = -0.01;
    const std::string w_csv =
        report::weights_csv(w, {-1.0, 1.0}, {0.5, -0.5});
    CHECK(w_csv.rfind("index,x,g,raw,weight\n", 0) == 0);
    CHECK(count_occurrences(w_csv, "\n") == 3);

    BiasReport b;
    b.h = 0.1;
    b.x = 0.0;
    b.expected_value = 0.3985;
    b.truth = 0.3989;
    b.bias = b.expected_value - b.truth;
    b.bias_over_h2 = b.bias / 0.01;
    const std::string b_csv = report::bias_table_csv({b});
    CHECK(b_csv.rfind("h,x,expected_value,truth,bias,bias_over_h2\n", 0) == 0);
    CHECK(count_occurrences(b_csv, "\n") == 2);
}

TEST_CASE("data file reader accepts comments and rejects junk") {
    const std::string path = temp_path("data");
    {
        std::ofstream out(path);
        out << "# header comment\n";
        out << "1.5\n";
        out << "  -2.25  # trailing comment\n";
        out << "\n";
        out << "3e-2\n";
    }
    const auto values = report::read_data_file(path);
    REQUIRE(values.size() == 3);
    CHECK(values[0] == 1.5);
    CHECK(values[1] == -2.25);
    CHECK(values[2] == 0.03);

    {
        std::ofstream out(path);
        out << "1.0\nnot-a-number\n";
    }
    CHECK_THROWS_AS(report::read_data_file(path), InvalidInput);
    {
        std::ofstream out(path);
        out << "# only comments\n";
    }
    CHECK_THROWS_AS(report::read_data_file(path), InvalidInput);
    std::remove(path.c_str());
    CHECK_THROWS_AS(report::read_data_file(path), IoError);
}

TEST_CASE("text writer errors on unwritable paths") {
    CHECK_THROWS_AS(report::write_text_file("/nonexistent-dir/file.txt", "x"), IoError);
    const std::string path = temp_path("write");
    report::write_text_file(path, "payload");
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content == "payload");
    std::remove(path.c_str());
}

} // TEST_SUITE
