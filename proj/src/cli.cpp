#include "tiltkde/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "tiltkde/density.hpp"
#include "tiltkde/errors.hpp"
#include "tiltkde/estimator.hpp"
#include "tiltkde/kernel.hpp"
#include "tiltkde/parallel.hpp"
#include "tiltkde/rate_lab.hpp"
#include "tiltkde/report.hpp"
#include "tiltkde/summation.hpp"
#include "tiltkde/tilt.hpp"

namespace tiltkde {

namespace {

// Flag-validation failure: reported on one line, exit code 2.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& message) : std::runtime_error(message) {}
};

std::vector<double> parse_double_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::stringstream stream(text);
    std::string token;
    while (std::getline(stream, token, ',')) {
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        if (token.empty() || end != token.c_str() + token.size() || !std::isfinite(v))
            throw UsageError(flag + ": not a number: '" + token + "'");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError(flag + ": empty list");
    return out;
}

std::vector<std::size_t> parse_count_list(const std::string& text, const std::string& flag) {
    std::vector<std::size_t> out;
    std::stringstream stream(text);
    std::string token;
    while (std::getline(stream, token, ',')) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(token.c_str(), &end, 10);
        if (token.empty() || end != token.c_str() + token.size() || v == 0)
            throw UsageError(flag + ": not a positive integer: '" + token + "'");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) throw UsageError(flag + ": empty list");
    return out;
}

std::vector<double> parse_grid(const std::string& text) {
    double lo = 0.0, hi = 0.0;
    long count = 0;
    std::stringstream stream(text);
    std::string a, b, c;
    if (!std::getline(stream, a, ':') || !std::getline(stream, b, ':') || !std::getline(stream, c))
        throw UsageError("--grid expects lo:hi:count, got '" + text + "'");
    char* end = nullptr;
    lo = std::strtod(a.c_str(), &end);
    if (end != a.c_str() + a.size()) throw UsageError("--grid: bad lower bound '" + a + "'");
    hi = std::strtod(b.c_str(), &end);
    if (end != b.c_str() + b.size()) throw UsageError("--grid: bad upper bound '" + b + "'");
    count = std::strtol(c.c_str(), &end, 10);
    if (end != c.c_str() + c.size() || count < 1)
        throw UsageError("--grid: bad count '" + c + "'");
    if (count > 1 && !(hi > lo)) throw UsageError("--grid: needs lo < hi");
    std::vector<double> out(static_cast<std::size_t>(count));
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    for (long i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return out;
}

Kernel parse_kernel(const std::string& name) {
    try {
        return Kernel::by_name(name);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

ReferenceDensity parse_density(const std::string& name) {
    try {
        return ReferenceDensity::by_name(name);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

// Flags shared by the estimate and weights subcommands.
struct DataFlags {
    std::string data_path;
    std::string density_name;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

struct TiltFlags {
    std::string mode = "none";
    double lead_constant = std::numeric_limits<double>::quiet_NaN(); // NaN = kernel default
    double clip = 50.0;
    std::string policy = "signed";
    double pilot_h = 0.0; // 0 = derive from the sample
    std::string pilot_kernel = "triweight";
};

void add_data_flags(CLI::App* cmd, DataFlags& flags) {
    cmd->add_option("--data", flags.data_path,
                    "Input data file (one numeric value per line, # comments)");
    cmd->add_option("--density", flags.density_name,
                    "Reference density: normal|bimodal|claw");
    cmd->add_option("--n", flags.n, "Sample size drawn from --density");
    cmd->add_option("--seed", flags.seed, "Sampler seed")->default_val(0);
    cmd->add_option("--stream", flags.stream, "Sampler stream id")->default_val(0);
}

void add_tilt_flags(CLI::App* cmd, TiltFlags& flags) {
    cmd->add_option("--tilt", flags.mode, "Tilt mode: none|oracle|plugin")->default_val("none");
    cmd->add_option("--tilt-c", flags.lead_constant,
                    "Tilt constant c in g = c*f''/f (omit for the kernel-derived default)");
    cmd->add_option("--clip", flags.clip, "Clip bound for g")->default_val(50.0);
    cmd->add_option("--weight-policy", flags.policy, "Weight policy: signed|clamp")
        ->default_val("signed");
    cmd->add_option("--pilot-h", flags.pilot_h,
                    "Pilot bandwidth for plugin tilt (omit to derive from the sample)");
    cmd->add_option("--pilot-kernel", flags.pilot_kernel,
                    "Pilot kernel for plugin tilt (smoothness >= 2)")
        ->default_val("triweight");
}

TiltMode parse_tilt_mode(const std::string& text) {
    try {
        return tilt_mode_from_string(text);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

WeightPolicy parse_weight_policy(const std::string& text) {
    try {
        return weight_policy_from_string(text);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

double sample_stddev(std::span<const double> sample) {
    const double n = static_cast<double>(sample.size());
    const double mean = compensated_total(sample) / n;
    CompensatedSum ss;
    for (double v : sample) ss.add((v - mean) * (v - mean));
    return sample.size() > 1 ? std::sqrt(ss.value() / (n - 1.0)) : 0.0;
}

// Sorted sample plus, when drawn from a named density, the ground truth.
struct ResolvedData {
    std::vector<double> sample;
    std::optional<ReferenceDensity> truth;
};

ResolvedData resolve_data(const DataFlags& flags) {
    const bool has_file = !flags.data_path.empty();
    const bool has_density = !flags.density_name.empty();
    if (has_file == has_density)
        throw UsageError("exactly one data source required: --data FILE or --density NAME --n INT");
    ResolvedData out;
    if (has_file) {
        out.sample = report::read_data_file(flags.data_path);
        std::sort(out.sample.begin(), out.sample.end());
        return out;
    }
    if (flags.n == 0) throw UsageError("--n must be at least 1 when sampling from a density");
    out.truth = parse_density(flags.density_name);
    out.sample = SeededSampler(*out.truth, flags.seed, flags.stream).sample(flags.n);
    return out;
}

TiltConfig resolve_tilt(const TiltFlags& flags, const Kernel& kernel,
                        std::span<const double> sample, bool truth_available) {
    TiltConfig config;
    config.mode = parse_tilt_mode(flags.mode);
    config.policy = parse_weight_policy(flags.policy);
    if (!(flags.clip > 0.0)) throw UsageError("--clip must be positive");
    config.clip_bound = flags.clip;
    config.lead_constant = std::isnan(flags.lead_constant)
                               ? TiltConfig::kernel_default_lead(kernel)
                               : flags.lead_constant;
    if (config.mode == TiltMode::Oracle && !truth_available)
        throw UsageError("oracle tilt requires a named --density as ground truth");
    if (config.mode == TiltMode::Plugin) {
        const Kernel pilot = parse_kernel(flags.pilot_kernel);
        if (pilot.smoothness() < 2)
            throw UsageError("--pilot-kernel needs smoothness >= 2, got '" + pilot.name() + "'");
        config.pilot_kernel = flags.pilot_kernel;
        if (flags.pilot_h != 0.0) {
            if (!(flags.pilot_h > 0.0)) throw UsageError("--pilot-h must be positive");
            config.pilot_bandwidth = flags.pilot_h;
        } else {
            // rule-of-thumb pilot for curvature estimation
            const double sd = sample_stddev(sample);
            config.pilot_bandwidth =
                1.06 * (sd > 0.0 ? sd : 1.0) *
                std::pow(static_cast<double>(sample.size()), -1.0 / 9.0);
        }
    }
    return config;
}

void emit(const std::string& content, const std::string& path, std::ostream& out) {
    if (path.empty())
        out << content;
    else
        report::write_text_file(path, content);
}

void warn_truncated_tilt(int r, TiltMode mode, std::ostream& err) {
    if (r > 2 && mode != TiltMode::None)
        err << "warning: tilt truncated: only the leading f''/f term is implemented, so r=" << r
            << " runs cancel the h^2 bias term only\n";
}

int command_estimate(const DataFlags& data_flags, const TiltFlags& tilt_flags,
                     const std::string& kernel_name, int r, int s, double h_explicit,
                     double h_rule_c0, const std::string& grid_text, const std::string& out_path,
                     std::ostream& out, std::ostream& err) {
    const Kernel kernel = parse_kernel(kernel_name);
    if (r < 2 || r % 2 != 0) throw UsageError("--r must be an even integer >= 2");
    if (s < 0) throw UsageError("--s must be nonnegative");
    if (s > kernel.smoothness()) throw UsageError("s exceeds kernel smoothness (s=" +
                                                  std::to_string(s) + ", " + kernel.name() +
                                                  " smoothness=" +
                                                  std::to_string(kernel.smoothness()) + ")");
    if (s > r) throw UsageError("--s must satisfy 0 <= s <= r");
    if (!std::isnan(h_explicit) && !std::isnan(h_rule_c0))
        throw UsageError("--h and --h-rule are mutually exclusive");
    if (!std::isnan(h_explicit) && !(h_explicit > 0.0))
        throw UsageError("--h must be positive");
    if (!std::isnan(h_rule_c0) && !(h_rule_c0 > 0.0))
        throw UsageError("--h-rule constant must be positive");
    const std::vector<double> grid = parse_grid(grid_text);
    if (parse_tilt_mode(tilt_flags.mode) == TiltMode::Oracle && data_flags.density_name.empty())
        throw UsageError("oracle tilt requires a named --density as ground truth");
    warn_truncated_tilt(r, parse_tilt_mode(tilt_flags.mode), err);

    const ResolvedData data = resolve_data(data_flags);
    const TiltConfig tilt =
        resolve_tilt(tilt_flags, kernel, data.sample, data.truth.has_value());

    EstimatorSpec spec;
    spec.kernel = kernel;
    spec.r = r;
    spec.s = s;
    spec.bandwidth = std::isnan(h_explicit)
                         ? BandwidthRule::rate(std::isnan(h_rule_c0) ? 1.0 : h_rule_c0)
                         : BandwidthRule::fixed(h_explicit);
    spec.tilt = tilt;

    const double h = spec.bandwidth.resolve(data.sample.size(), r);
    std::vector<double> g(data.sample.size(), 0.0);
    if (tilt.mode != TiltMode::None) {
        const TiltSource source =
            make_tilt_source(tilt, data.truth ? &*data.truth : nullptr, data.sample);
        g = tilt_values(source, tilt, data.sample);
    }
    const TiltWeights weights = compute_weights(data.sample, g, h, tilt.policy);
    const EstimateResult result = estimate(spec, data.sample, weights, grid);

    report::EstimateMeta meta;
    meta.n = data.sample.size();
    meta.s = s;
    meta.kernel = kernel.name();
    meta.tilt_mode = to_string(tilt.mode);
    emit(report::estimate_csv(result, meta), out_path, out);
    return 0;
}

int command_weights(const DataFlags& data_flags, const TiltFlags& tilt_flags,
                    const std::string& kernel_name, int r, double h_explicit, double h_rule_c0,
                    const std::string& out_path, std::ostream& out) {
    const Kernel kernel = parse_kernel(kernel_name);
    if (r < 2 || r % 2 != 0) throw UsageError("--r must be an even integer >= 2");
    if (!std::isnan(h_explicit) && !std::isnan(h_rule_c0))
        throw UsageError("--h and --h-rule are mutually exclusive");
    if (!std::isnan(h_explicit) && !(h_explicit > 0.0))
        throw UsageError("--h must be positive");
    if (!std::isnan(h_rule_c0) && !(h_rule_c0 > 0.0))
        throw UsageError("--h-rule constant must be positive");
    if (parse_tilt_mode(tilt_flags.mode) == TiltMode::Oracle && data_flags.density_name.empty())
        throw UsageError("oracle tilt requires a named --density as ground truth");

    const ResolvedData data = resolve_data(data_flags);
    const TiltConfig tilt =
        resolve_tilt(tilt_flags, kernel, data.sample, data.truth.has_value());
    const BandwidthRule rule = std::isnan(h_explicit)
                                   ? BandwidthRule::rate(std::isnan(h_rule_c0) ? 1.0 : h_rule_c0)
                                   : BandwidthRule::fixed(h_explicit);
    const double h = rule.resolve(data.sample.size(), r);

    std::vector<double> g(data.sample.size(), 0.0);
    if (tilt.mode != TiltMode::None) {
        const TiltSource source =
            make_tilt_source(tilt, data.truth ? &*data.truth : nullptr, data.sample);
        g = tilt_values(source, tilt, data.sample);
    }
    const TiltWeights weights = compute_weights(data.sample, g, h, tilt.policy);
    emit(report::weights_csv(weights, data.sample, g), out_path, out);
    return 0;
}

int command_bias_oracle(const std::string& density_name, const std::string& kernel_name, int s,
                        const TiltFlags& tilt_flags, const std::string& h_grid_text,
                        const std::string& points_text, const std::string& out_path,
                        std::ostream& out) {
    const Kernel kernel = parse_kernel(kernel_name);
    const ReferenceDensity density = parse_density(density_name);
    if (s < 0) throw UsageError("--s must be nonnegative");
    if (s > kernel.smoothness()) throw UsageError("s exceeds kernel smoothness (s=" +
                                                  std::to_string(s) + ", " + kernel.name() +
                                                  " smoothness=" +
                                                  std::to_string(kernel.smoothness()) + ")");
    const std::vector<double> h_grid = parse_double_list(h_grid_text, "--h-grid");
    for (double h : h_grid)
        if (!(h > 0.0)) throw UsageError("--h-grid entries must be positive");
    const std::vector<double> points = parse_double_list(points_text, "--points");

    TiltConfig tilt;
    tilt.mode = parse_tilt_mode(tilt_flags.mode);
    if (tilt.mode == TiltMode::Plugin)
        throw UsageError("bias-oracle supports --tilt none|oracle (the expectation is a "
                         "population quantity)");
    if (!(tilt_flags.clip > 0.0)) throw UsageError("--clip must be positive");
    tilt.clip_bound = tilt_flags.clip;
    tilt.lead_constant = std::isnan(tilt_flags.lead_constant)
                             ? TiltConfig::kernel_default_lead(kernel)
                             : tilt_flags.lead_constant;

    std::vector<BiasReport> reports;
    for (double h : h_grid)
        for (double x : points)
            reports.push_back(expectation_quadrature(density, kernel, tilt, h, s, x));
    emit(report::bias_table_csv(reports), out_path, out);
    return 0;
}

int command_verify_rate(const std::string& density_name, const std::string& kernel_name, int r,
                        int s, const std::string& n_grid_text, std::size_t reps,
                        std::uint64_t seed, const TiltFlags& tilt_flags, double c0,
                        const std::string& eval_points_text, const std::string& stat_text,
                        double tolerance, unsigned threads, const std::string& out_path,
                        const std::string& csv_path, const std::string& svg_path,
                        std::ostream& out, std::ostream& err) {
    const Kernel kernel = parse_kernel(kernel_name);
    const ReferenceDensity density = parse_density(density_name);
    if (r < 2 || r % 2 != 0) throw UsageError("--r must be an even integer >= 2");
    if (s < 0 || s > r) throw UsageError("--s must satisfy 0 <= s <= r");
    if (s > kernel.smoothness()) throw UsageError("s exceeds kernel smoothness (s=" +
                                                  std::to_string(s) + ", " + kernel.name() +
                                                  " smoothness=" +
                                                  std::to_string(kernel.smoothness()) + ")");
    const std::vector<std::size_t> n_grid = parse_count_list(n_grid_text, "--n-grid");
    for (std::size_t i = 0; i + 1 < n_grid.size(); ++i)
        if (n_grid[i] >= n_grid[i + 1]) throw UsageError("--n-grid must be strictly increasing");
    if (n_grid.size() < 4) throw UsageError("--n-grid needs at least 4 entries");
    if (reps < 50) throw UsageError("--reps must be at least 50");
    if (!(c0 > 0.0)) throw UsageError("--c0 must be positive");
    if (!(tolerance > 0.0)) throw UsageError("--tolerance must be positive");
    const std::vector<double> eval_points = parse_double_list(eval_points_text, "--eval-points");

    ErrorStatistic statistic;
    try {
        statistic = error_statistic_from_string(stat_text);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }

    TiltConfig tilt;
    tilt.mode = parse_tilt_mode(tilt_flags.mode);
    tilt.policy = parse_weight_policy(tilt_flags.policy);
    if (!(tilt_flags.clip > 0.0)) throw UsageError("--clip must be positive");
    tilt.clip_bound = tilt_flags.clip;
    tilt.lead_constant = std::isnan(tilt_flags.lead_constant)
                             ? TiltConfig::kernel_default_lead(kernel)
                             : tilt_flags.lead_constant;
    if (tilt.mode == TiltMode::Plugin) {
        const Kernel pilot = parse_kernel(tilt_flags.pilot_kernel);
        if (pilot.smoothness() < 2)
            throw UsageError("--pilot-kernel needs smoothness >= 2, got '" + pilot.name() + "'");
        if (!(tilt_flags.pilot_h > 0.0))
            throw UsageError("--tilt plugin requires --pilot-h > 0 for rate runs");
        tilt.pilot_kernel = tilt_flags.pilot_kernel;
        tilt.pilot_bandwidth = tilt_flags.pilot_h;
    }

    warn_truncated_tilt(r, tilt.mode, err);

    ExperimentPlan plan;
    plan.density = density;
    plan.spec.kernel = kernel;
    plan.spec.r = r;
    plan.spec.s = s;
    plan.spec.bandwidth = BandwidthRule::rate(c0);
    plan.spec.tilt = tilt;
    plan.n_grid = n_grid;
    plan.replications = reps;
    plan.eval_points = eval_points;
    plan.base_seed = seed;
    plan.statistic = statistic;
    plan.tolerance = tolerance;

    const RateReport result = run_experiment(plan, threads);

    if (!out_path.empty()) report::write_text_file(out_path, report::rate_report_json(result));
    if (!csv_path.empty()) report::write_text_file(csv_path, report::rate_rows_csv(result));
    if (!svg_path.empty()) report::write_text_file(svg_path, report::rate_report_svg(result));

    out << "fitted_slope=" << report::format_double(result.fitted_slope)
        << " theoretical_slope=" << report::format_double(result.theoretical_slope)
        << " tolerance=" << report::format_double(result.tolerance)
        << " pass=" << (result.pass ? "true" : "false") << "\n";
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tilted kernel estimation of a density and its derivatives"};
    app.name("tiltkde");
    app.require_subcommand(1);
    app.set_help_flag("--help", "Print help and exit");

    // --- estimate ---
    auto* estimate_cmd =
        app.add_subcommand("estimate", "Evaluate the tilted estimate on a grid (CSV)");
    estimate_cmd->set_help_flag("--help", "Print help and exit");
    DataFlags est_data;
    TiltFlags est_tilt;
    std::string est_kernel = "epanechnikov";
    int est_r = 2;
    int est_s = 0;
    double est_h = std::numeric_limits<double>::quiet_NaN();
    double est_h_rule = std::numeric_limits<double>::quiet_NaN();
    std::string est_grid = "-3:3:201";
    std::string est_out;
    add_data_flags(estimate_cmd, est_data);
    estimate_cmd->add_option("--kernel", est_kernel,
                             "Kernel: epanechnikov|biweight|triweight|gaussian")
        ->default_val("epanechnikov");
    estimate_cmd->add_option("--r", est_r, "Assumed smoothness r (even)")->default_val(2);
    estimate_cmd->add_option("--s", est_s, "Derivative order s")->default_val(0);
    estimate_cmd->add_option("--h", est_h, "Explicit bandwidth");
    estimate_cmd->add_option("--h-rule", est_h_rule,
                             "Bandwidth rule constant c0 in h = c0 * n^(-1/(2r+1))");
    add_tilt_flags(estimate_cmd, est_tilt);
    estimate_cmd->add_option("--grid", est_grid, "Query grid lo:hi:count")
        ->default_val("-3:3:201");
    estimate_cmd->add_option("--out", est_out, "Output CSV path (default: stdout)");

    // --- weights ---
    auto* weights_cmd =
        app.add_subcommand("weights", "Inspect tilt weights for a sample (CSV)");
    weights_cmd->set_help_flag("--help", "Print help and exit");
    DataFlags w_data;
    TiltFlags w_tilt;
    std::string w_kernel = "epanechnikov";
    int w_r = 2;
    double w_h = std::numeric_limits<double>::quiet_NaN();
    double w_h_rule = std::numeric_limits<double>::quiet_NaN();
    std::string w_out;
    add_data_flags(weights_cmd, w_data);
    weights_cmd->add_option("--kernel", w_kernel,
                            "Kernel used for the default tilt constant")
        ->default_val("epanechnikov");
    weights_cmd->add_option("--r", w_r, "Assumed smoothness r (even)")->default_val(2);
    weights_cmd->add_option("--h", w_h, "Explicit bandwidth");
    weights_cmd->add_option("--h-rule", w_h_rule, "Bandwidth rule constant c0");
    add_tilt_flags(weights_cmd, w_tilt);
    weights_cmd->add_option("--out", w_out, "Output CSV path (default: stdout)");

    // --- bias-oracle ---
    auto* bias_cmd = app.add_subcommand(
        "bias-oracle", "Quadrature expectation/bias of the non-standardised estimator (CSV)");
    bias_cmd->set_help_flag("--help", "Print help and exit");
    std::string b_density = "normal";
    std::string b_kernel = "epanechnikov";
    int b_s = 0;
    TiltFlags b_tilt;
    b_tilt.mode = "oracle";
    std::string b_h_grid = "0.2,0.1";
    std::string b_points = "0,0.5,1";
    std::string b_out;
    bias_cmd->add_option("--density", b_density, "Reference density: normal|bimodal|claw")
        ->default_val("normal");
    bias_cmd->add_option("--kernel", b_kernel,
                         "Kernel: epanechnikov|biweight|triweight|gaussian")
        ->default_val("epanechnikov");
    bias_cmd->add_option("--s", b_s, "Derivative order s")->default_val(0);
    bias_cmd->add_option("--tilt", b_tilt.mode, "Tilt mode: none|oracle")->default_val("oracle");
    bias_cmd->add_option("--tilt-c", b_tilt.lead_constant,
                         "Tilt constant c (omit for the kernel-derived default)");
    bias_cmd->add_option("--clip", b_tilt.clip, "Clip bound for g")->default_val(50.0);
    bias_cmd->add_option("--h-grid", b_h_grid, "Comma-separated bandwidths")
        ->default_val("0.2,0.1");
    bias_cmd->add_option("--points", b_points, "Comma-separated evaluation points")
        ->default_val("0,0.5,1");
    bias_cmd->add_option("--out", b_out, "Output CSV path (default: stdout)");

    // --- verify-rate ---
    auto* rate_cmd = app.add_subcommand(
        "verify-rate", "Monte Carlo convergence-rate verification (JSON/CSV/SVG)");
    rate_cmd->set_help_flag("--help", "Print help and exit");
    std::string r_density = "normal";
    std::string r_kernel = "epanechnikov";
    int r_r = 2;
    int r_s = 0;
    std::string r_n_grid = "512,1024,2048,4096,8192,16384";
    std::size_t r_reps = 200;
    std::uint64_t r_seed = 0;
    TiltFlags r_tilt;
    r_tilt.mode = "oracle";
    double r_c0 = 1.0;
    std::string r_eval_points = "0,0.5,1";
    std::string r_stat = "median";
    double r_tolerance = 0.12;
    unsigned r_threads = 0;
    std::string r_out, r_csv, r_svg;
    rate_cmd->add_option("--density", r_density, "Reference density: normal|bimodal|claw")
        ->default_val("normal");
    rate_cmd->add_option("--kernel", r_kernel,
                         "Kernel: epanechnikov|biweight|triweight|gaussian")
        ->default_val("epanechnikov");
    rate_cmd->add_option("--r", r_r, "Assumed smoothness r (even)")->default_val(2);
    rate_cmd->add_option("--s", r_s, "Derivative order s")->default_val(0);
    rate_cmd->add_option("--n-grid", r_n_grid, "Comma-separated sample sizes (increasing)")
        ->default_val("512,1024,2048,4096,8192,16384");
    rate_cmd->add_option("--reps", r_reps, "Replications per sample size (>= 50)")
        ->default_val(200);
    rate_cmd->add_option("--seed", r_seed, "Base seed")->default_val(0);
    rate_cmd->add_option("--tilt", r_tilt.mode, "Tilt mode: none|oracle|plugin")
        ->default_val("oracle");
    rate_cmd->add_option("--tilt-c", r_tilt.lead_constant,
                         "Tilt constant c (omit for the kernel-derived default)");
    rate_cmd->add_option("--clip", r_tilt.clip, "Clip bound for g")->default_val(50.0);
    rate_cmd->add_option("--weight-policy", r_tilt.policy, "Weight policy: signed|clamp")
        ->default_val("signed");
    rate_cmd->add_option("--pilot-h", r_tilt.pilot_h, "Pilot bandwidth for plugin tilt");
    rate_cmd->add_option("--pilot-kernel", r_tilt.pilot_kernel,
                         "Pilot kernel for plugin tilt (smoothness >= 2)")
        ->default_val("triweight");
    rate_cmd->add_option("--c0", r_c0, "Bandwidth rule constant c0")->default_val(1.0);
    rate_cmd->add_option("--eval-points", r_eval_points, "Comma-separated evaluation points")
        ->default_val("0,0.5,1");
    rate_cmd->add_option("--stat", r_stat, "Error statistic: median|mean|rmse")
        ->default_val("median");
    rate_cmd->add_option("--tolerance", r_tolerance, "Pass tolerance on the fitted slope")
        ->default_val(0.12);
    rate_cmd->add_option("--threads", r_threads, "Worker threads (0 = all cores)")
        ->default_val(0);
    rate_cmd->add_option("--out", r_out, "JSON report path");
    rate_cmd->add_option("--csv", r_csv, "Per-(n, point) rows CSV path");
    rate_cmd->add_option("--svg", r_svg, "Log-log plot SVG path");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("tiltkde");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        const CLI::App* target = &app;
        while (!target->get_subcommands().empty()) target = target->get_subcommands().front();
        out << target->help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        err << "run 'tiltkde --help' for usage\n";
        return 2;
    }

    try {
        if (estimate_cmd->parsed())
            return command_estimate(est_data, est_tilt, est_kernel, est_r, est_s, est_h,
                                    est_h_rule, est_grid, est_out, out, err);
        if (weights_cmd->parsed())
            return command_weights(w_data, w_tilt, w_kernel, w_r, w_h, w_h_rule, w_out, out);
        if (bias_cmd->parsed())
            return command_bias_oracle(b_density, b_kernel, b_s, b_tilt, b_h_grid, b_points,
                                       b_out, out);
        if (rate_cmd->parsed())
            return command_verify_rate(r_density, r_kernel, r_r, r_s, r_n_grid, r_reps, r_seed,
                                       r_tilt, r_c0, r_eval_points, r_stat, r_tolerance,
                                       r_threads, r_out, r_csv, r_svg, out, err);
        err << "no subcommand selected; run 'tiltkde --help'\n";
        return 2;
    } catch (const UsageError& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << e.kind() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

} // namespace tiltkde
