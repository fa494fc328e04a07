#pragma once

// Sampling-rate sweeps.
//
// For each analysis window the unthinned series supplies the baselines: the
// dominant autocorrelation lag, the ordinal (order, delay) pair, the moments
// feeding the closed-form curves and every metric's p = 1 value. Those stay
// fixed while the window is thinned at each rate and replicate. Results are
// long-format records (label, window, rate, replicate, metric, empirical,
// theoretical, relative).
//
// Seeds: window w, replicate i and rate p thin with
//   stable_mix(window_base(base_seed, w), i, p)
// where window_base(b, 0) = b and window_base(b, w) = mix64(b ^ mix64(w)).
// Window start indices are uniform draws (overlap allowed) from an
// std::mt19937_64 seeded with mix64(base_seed ^ kWindowStream).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <tuple>
#include <variant>
#include <vector>
#include <charconv>

#include <boost/random/uniform_int_distribution.hpp>
#include <nlohmann/json.hpp>

#include "thinpred/diagnostics.hpp"
#include "thinpred/errors.hpp"
#include "thinpred/forecast.hpp"
#include "thinpred/format.hpp"
#include "thinpred/infotheory.hpp"
#include "thinpred/ordinal.hpp"
#include "thinpred/sampling.hpp"
#include "thinpred/series.hpp"
#include "thinpred/synth.hpp"
#include "thinpred/theory.hpp"

namespace thinpred {

// CSV ingestion ----------------------------------------------------------------

namespace detail {

inline std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

inline bool parse_double(const std::string& text, double& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    const char* first = t.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
    return ec == std::errc() && ptr == t.data() + t.size();
}

}  // namespace detail

/// Reads one named column. Line numbers in errors are 1-based and count the
/// header as line 1.
[[nodiscard]] inline CountSeries parse_series_csv(std::istream& in, const std::string& column,
                                                  const std::string& source = "<stream>") {
    std::string line;
    std::vector<std::string> fields;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) fail_argument(source + ": empty CSV (no header row)");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!split_csv_line(line, fields)) fail_argument(source + ": malformed header at line 1");
    std::optional<std::size_t> col;
    const std::size_t width = fields.size();
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (detail::trim(fields[i]) == column) {
            col = i;
            break;
        }
    }
    if (!col) fail_argument(source + ": column '" + column + "' not found in header");

    std::vector<double> values;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        const std::string where = source + ": line " + std::to_string(line_no);
        if (!split_csv_line(line, fields) || fields.size() != width) {
            fail_argument(where + ": malformed row (expected " + std::to_string(width) + " fields)");
        }
        double v = 0.0;
        if (!detail::parse_double(fields[*col], v) || !std::isfinite(v)) {
            fail_argument(where + ": cannot parse '" + fields[*col] + "' as a number");
        }
        if (v < 0.0) fail_argument(where + ": negative count " + fields[*col]);
        values.push_back(v);
    }
    if (values.empty()) fail_argument(source + ": no data rows");
    return CountSeries(std::move(values), column);
}

[[nodiscard]] inline CountSeries load_series_csv(const std::filesystem::path& path, const std::string& column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return parse_series_csv(in, column, path.string());
}

// Configuration ---------------------------------------------------------------

inline const std::vector<std::string>& known_metrics() {
    static const std::vector<std::string> names{"arch",  "autocorr", "cov_external", "mi",
                                                "nrmse", "nrmse_poisson", "pearson_external", "wpe"};
    return names;
}

[[nodiscard]] inline bool metric_needs_external(const std::string& m) {
    return m == "mi" || m == "cov_external" || m == "pearson_external";
}

struct ColumnSource {
    std::string path;
    std::string column;
};

struct WindowSpec {
    std::size_t length = 52;
    std::size_t count = 1;
};

struct SweepOptions {
    std::size_t max_lag = 20;  // dominant-lag search bound
    int mi_bins = 0;           // 0: default_bin_count(window length)
    OrdinalSearchRange ordinal{};
    double split = 0.7;
    std::size_t k_max = 3;
    std::size_t l_max = 2;
    std::size_t refit_every = 1;
    int arch_max_lag = 100;
};

struct SweepConfig {
    std::variant<ColumnSource, PairSpec> source;
    std::optional<ColumnSource> external;  // CSV sources only; synthetic pairs carry S
    std::string label;
    std::vector<double> rates{1.0};
    std::size_t replicates = 1;
    std::uint64_t base_seed = 0;
    std::vector<std::string> metrics{"autocorr"};
    std::optional<WindowSpec> window;
    SweepOptions options{};

    void validate() const {
        if (rates.empty()) fail_argument("SweepConfig: rates must not be empty");
        for (std::size_t i = 0; i < rates.size(); ++i) {
            if (!(rates[i] > 0.0 && rates[i] <= 1.0)) fail_argument("SweepConfig: rates must lie in (0, 1]");
            if (i > 0 && !(rates[i] > rates[i - 1])) fail_argument("SweepConfig: rates must be strictly ascending");
        }
        if (replicates < 1) fail_argument("SweepConfig: replicates must be >= 1");
        if (metrics.empty()) fail_argument("SweepConfig: at least one metric is required");
        const auto& known = known_metrics();
        const bool has_external = external.has_value() || std::holds_alternative<PairSpec>(source);
        for (const auto& m : metrics) {
            if (std::find(known.begin(), known.end(), m) == known.end()) {
                fail_argument("SweepConfig: unknown metric '" + m + "'");
            }
            if (metric_needs_external(m) && !has_external) {
                fail_argument("SweepConfig: metric '" + m + "' needs an external series");
            }
        }
        if (window && (window->length < 3 || window->count < 1)) {
            fail_argument("SweepConfig: window needs length >= 3 and count >= 1");
        }
        if (!(options.split > 0.0 && options.split < 1.0)) fail_argument("SweepConfig: split must lie in (0, 1)");
        if (options.refit_every < 1) fail_argument("SweepConfig: refit_every must be >= 1");
        if (options.max_lag < 1) fail_argument("SweepConfig: max_lag must be >= 1");
        if (options.arch_max_lag < 1) fail_argument("SweepConfig: arch_max_lag must be >= 1");
    }
};

[[nodiscard]] inline SweepConfig sweep_config_from_json(const nlohmann::json& j) {
    try {
        SweepConfig cfg;
        const auto& src = j.at("source");
        if (src.contains("synthetic")) {
            cfg.source = pair_spec_from_json(src.at("synthetic"));
            cfg.label = "synthetic";
        } else if (src.contains("csv")) {
            const auto& c = src.at("csv");
            cfg.source = ColumnSource{c.at("path").get<std::string>(), c.at("column").get<std::string>()};
            cfg.label = c.at("column").get<std::string>();
        } else {
            fail_argument("SweepConfig JSON: source needs a 'csv' or 'synthetic' entry");
        }
        if (j.contains("external") && !j.at("external").is_null()) {
            const auto& e = j.at("external");
            std::string path;
            if (e.contains("path")) {
                path = e.at("path").get<std::string>();
            } else if (const auto* cs = std::get_if<ColumnSource>(&cfg.source)) {
                path = cs->path;
            }
            cfg.external = ColumnSource{path, e.at("column").get<std::string>()};
        }
        cfg.label = j.value("label", cfg.label);
        cfg.rates = j.value("rates", cfg.rates);
        cfg.replicates = j.value("replicates", cfg.replicates);
        cfg.base_seed = j.value("base_seed", cfg.base_seed);
        cfg.metrics = j.value("metrics", cfg.metrics);
        if (j.contains("window") && !j.at("window").is_null()) {
            const auto& w = j.at("window");
            cfg.window = WindowSpec{w.value("length", std::size_t{52}), w.value("count", std::size_t{1})};
        }
        if (j.contains("options")) {
            const auto& o = j.at("options");
            auto& opt = cfg.options;
            opt.max_lag = o.value("max_lag", opt.max_lag);
            opt.mi_bins = o.value("mi_bins", opt.mi_bins);
            opt.ordinal.order_min = o.value("ordinal_order_min", opt.ordinal.order_min);
            opt.ordinal.order_max = o.value("ordinal_order_max", opt.ordinal.order_max);
            opt.ordinal.delay_min = o.value("ordinal_delay_min", opt.ordinal.delay_min);
            opt.ordinal.delay_max = o.value("ordinal_delay_max", opt.ordinal.delay_max);
            opt.split = o.value("split", opt.split);
            opt.k_max = o.value("k_max", opt.k_max);
            opt.l_max = o.value("l_max", opt.l_max);
            opt.refit_every = o.value("refit_every", opt.refit_every);
            opt.arch_max_lag = o.value("arch_max_lag", opt.arch_max_lag);
        }
        cfg.validate();
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        fail_argument(std::string("SweepConfig JSON: ") + e.what());
    }
}

/// Reads a SweepConfig file. Relative CSV paths resolve against the
/// directory holding the config.
[[nodiscard]] inline SweepConfig load_sweep_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        fail_argument(path.string() + ": " + e.what());
    }
    auto cfg = sweep_config_from_json(j);
    const auto base = path.parent_path();
    const auto resolve = [&](std::string& p) {
        if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).string();
    };
    if (auto* cs = std::get_if<ColumnSource>(&cfg.source)) resolve(cs->path);
    if (cfg.external) resolve(cfg.external->path);
    return cfg;
}

// Results ---------------------------------------------------------------------

struct SweepRecord {
    std::string label;
    std::size_t window = 0;
    double rate = 1.0;
    std::size_t replicate = 0;
    std::string metric;
    double empirical = 0.0;
    std::optional<double> theoretical;
    std::optional<double> relative;

    friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

struct SweepResult {
    std::vector<SweepRecord> records;
    nlohmann::json metadata = nlohmann::json::object();
};

inline void sort_records(std::vector<SweepRecord>& records) {
    std::stable_sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
        return std::tie(a.label, a.window, a.rate, a.replicate, a.metric) <
               std::tie(b.label, b.window, b.rate, b.replicate, b.metric);
    });
}

// Sampling coordinates --------------------------------------------------------

inline constexpr std::uint64_t kWindowStream = 0x77696e646f77ULL;  // "window"

[[nodiscard]] constexpr std::uint64_t window_base_seed(std::uint64_t base_seed, std::size_t window) noexcept {
    return window == 0 ? base_seed : mix64(base_seed ^ mix64(window));
}

[[nodiscard]] constexpr std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t window,
                                                std::size_t replicate, double rate) noexcept {
    return stable_mix(window_base_seed(base_seed, window), replicate, rate);
}

/// `count` uniformly drawn start indices in [0, n - length].
[[nodiscard]] inline std::vector<std::size_t> window_starts(std::size_t n, std::size_t length, std::size_t count,
                                                            std::uint64_t base_seed) {
    if (length > n) {
        fail_argument("window length " + std::to_string(length) + " exceeds series length " + std::to_string(n));
    }
    Engine engine(mix64(base_seed ^ kWindowStream));
    boost::random::uniform_int_distribution<std::size_t> start(0, n - length);
    std::vector<std::size_t> out(count);
    for (auto& s : out) s = start(engine);
    return out;
}

// Sweep -----------------------------------------------------------------------

namespace detail {

struct WindowBaseline {
    std::size_t lag = 1;
    double autocorr = 0.0;
    OrdinalConfig ordinal{};
    Moments ground{};
    double cov_xs = 0.0;
    double rho_xs = 0.0;
    double sigma_s = 0.0;
    int mi_bins = 0;
};

struct MetricValues {
    std::map<std::string, double> values;
};

inline MetricValues compute_metrics(std::span<const double> y, std::span<const double> s,
                                    const std::vector<std::string>& metrics, const WindowBaseline& base,
                                    const SweepOptions& opt) {
    MetricValues out;
    std::optional<ForecastRun> ar_run;
    const auto ar_forecast = [&]() -> const ForecastRun& {
        if (!ar_run) {
            const std::size_t train = static_cast<std::size_t>(std::floor(opt.split * static_cast<double>(y.size())));
            const auto order = select_order_aic(y.first(train), opt.k_max, opt.l_max);
            ar_run = rolling_forecast(y, opt.split, order, opt.refit_every);
        }
        return *ar_run;
    };
    for (const auto& m : metrics) {
        double v = 0.0;
        if (m == "autocorr") {
            v = autocorrelation(y, base.lag);
        } else if (m == "wpe") {
            v = weighted_permutation_entropy(y, base.ordinal);
        } else if (m == "mi") {
            v = mutual_information(s, y, base.mi_bins);
        } else if (m == "cov_external") {
            v = cross_covariance(y, s, 0);
        } else if (m == "pearson_external") {
            v = pearson(y, s);
        } else if (m == "nrmse") {
            v = nrmse(ar_forecast());
        } else if (m == "nrmse_poisson") {
            v = nrmse(poisson_forecast(y, opt.split));
        } else if (m == "arch") {
            const auto& run = ar_forecast();
            const int lag = std::min<int>(opt.arch_max_lag, static_cast<int>(run.horizon) - 20);
            if (lag < 1) fail_argument("arch metric: test segment too short for the ELM test");
            v = elm_arch_test(run.residuals, lag).rejection_fraction(1, lag);
        }
        out.values[m] = v;
    }
    return out;
}

inline std::optional<double> theory_for(const std::string& m, double rate, const WindowBaseline& base) {
    if (m == "autocorr") {
        const SampledCovariance sc{base.ground.variance, base.ground.mean, base.autocorr * base.ground.variance, rate};
        return predicted_autocorrelation(sc);
    }
    if (m == "cov_external") return predicted_external_covariance(base.cov_xs, rate);
    if (m == "pearson_external") {
        const SampledCovariance sc{base.ground.variance, base.ground.mean, 0.0, rate};
        return predicted_external_pearson(base.rho_xs, sc, base.sigma_s);
    }
    return std::nullopt;
}

template <class F>
decltype(auto) with_coordinates(const std::string& where, F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(where + ": " + e.what());
    } catch (const std::domain_error& e) {
        throw std::domain_error(where + ": " + e.what());
    } catch (const std::exception& e) {
        throw std::runtime_error(where + ": " + e.what());
    }
}

}  // namespace detail

struct SweepInputs {
    CountSeries ground;
    std::optional<std::vector<double>> external;
};

[[nodiscard]] inline SweepInputs resolve_sweep_inputs(const SweepConfig& cfg) {
    SweepInputs in;
    if (const auto* pair = std::get_if<PairSpec>(&cfg.source)) {
        auto generated = generate_coupled_pair(*pair);
        in.ground = std::move(generated.ground);
        in.external = generated.external.data();
    } else {
        const auto& src = std::get<ColumnSource>(cfg.source);
        in.ground = load_series_csv(src.path, src.column);
        if (cfg.external) {
            in.external = load_series_csv(cfg.external->path, cfg.external->column).data();
            if (in.external->size() != in.ground.size()) {
                fail_argument("external series length does not match the ground series");
            }
        }
    }
    return in;
}

/// Runs the sweep on already-loaded inputs.
[[nodiscard]] inline SweepResult run_sweep(const SweepConfig& cfg, const SweepInputs& inputs) {
    cfg.validate();
    const auto& x_full = inputs.ground;
    const std::size_t n = x_full.size();
    std::vector<std::size_t> starts{0};
    std::size_t win_len = n;
    if (cfg.window) {
        win_len = cfg.window->length;
        starts = window_starts(n, win_len, cfg.window->count, cfg.base_seed);
    }
    std::vector<std::string> metrics = cfg.metrics;
    std::sort(metrics.begin(), metrics.end());
    metrics.erase(std::unique(metrics.begin(), metrics.end()), metrics.end());
    const auto wants = [&](const char* m) { return std::find(metrics.begin(), metrics.end(), m) != metrics.end(); };

    SweepResult result;
    result.metadata["label"] = cfg.label;
    result.metadata["series_length"] = n;
    result.metadata["window_length"] = win_len;
    result.metadata["window_starts"] = starts;
    result.metadata["rates"] = cfg.rates;
    result.metadata["replicates"] = cfg.replicates;
    result.metadata["base_seed"] = cfg.base_seed;
    result.metadata["metrics"] = metrics;
    result.metadata["windows"] = nlohmann::json::array();

    for (std::size_t w = 0; w < starts.size(); ++w) {
        const std::string wtag = "window " + std::to_string(w);
        const CountSeries x(std::vector<double>(x_full.data().begin() + static_cast<std::ptrdiff_t>(starts[w]),
                                                x_full.data().begin() + static_cast<std::ptrdiff_t>(starts[w] + win_len)),
                            x_full.label());
        std::vector<double> s;
        if (inputs.external) {
            s.assign(inputs.external->begin() + static_cast<std::ptrdiff_t>(starts[w]),
                     inputs.external->begin() + static_cast<std::ptrdiff_t>(starts[w] + win_len));
        }

        detail::WindowBaseline base;
        const auto baseline = detail::with_coordinates(wtag + ", baseline", [&] {
            base.ground = moments(x);
            if (wants("autocorr")) {
                base.lag = dominant_lag(x, std::min(cfg.options.max_lag, win_len - 2));
                base.autocorr = autocorrelation(x, base.lag);
            }
            if (wants("wpe")) base.ordinal = select_ordinal_params(x, cfg.options.ordinal);
            if (!s.empty()) {
                const auto ms = moments(s);
                base.sigma_s = std::sqrt(ms.variance);
                base.cov_xs = cross_covariance(x, s, 0);
                if (wants("pearson_external")) base.rho_xs = pearson(x, s);
            }
            base.mi_bins = cfg.options.mi_bins > 0 ? cfg.options.mi_bins : default_bin_count(win_len);
            return detail::compute_metrics(x, s, metrics, base, cfg.options);
        });
        nlohmann::json wmeta{{"window", w},
                             {"start", starts[w]},
                             {"ground_mean", base.ground.mean},
                             {"ground_variance", base.ground.variance}};
        if (wants("autocorr")) wmeta["dominant_lag"] = base.lag;
        if (wants("wpe")) wmeta["ordinal"] = {{"order", base.ordinal.order}, {"delay", base.ordinal.delay}};
        if (wants("mi")) wmeta["mi_bins"] = base.mi_bins;
        result.metadata["windows"].push_back(std::move(wmeta));

        for (double rate : cfg.rates) {
            for (std::size_t rep = 0; rep < cfg.replicates; ++rep) {
                const std::string where =
                    wtag + ", rate " + format_number(rate) + ", replicate " + std::to_string(rep);
                detail::with_coordinates(where, [&] {
                    const auto y = binomial_thin(x, rate, cell_seed(cfg.base_seed, w, rep, rate));
                    const auto vals = detail::compute_metrics(y, s, metrics, base, cfg.options);
                    for (const auto& m : metrics) {
                        SweepRecord r;
                        r.label = cfg.label;
                        r.window = w;
                        r.rate = rate;
                        r.replicate = rep;
                        r.metric = m;
                        r.empirical = vals.values.at(m);
                        r.theoretical = detail::theory_for(m, rate, base);
                        const double b = baseline.values.at(m);
                        if (std::abs(b) >= 1e-12) r.relative = r.empirical / b;
                        result.records.push_back(std::move(r));
                    }
                    return 0;
                });
            }
        }
    }
    sort_records(result.records);
    return result;
}

[[nodiscard]] inline SweepResult run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    return run_sweep(cfg, resolve_sweep_inputs(cfg));
}

// Emission --------------------------------------------------------------------

inline constexpr const char* kResultsHeader = "label,window,rate,replicate,metric,empirical,theoretical,relative";

inline void write_results_csv(const SweepResult& result, std::ostream& out) {
    out << kResultsHeader << '\n';
    const auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    for (const auto& r : result.records) {
        out << csv_escape(r.label) << ',' << r.window << ',' << format_number(r.rate) << ',' << r.replicate << ','
            << csv_escape(r.metric) << ',' << format_number(r.empirical) << ',' << opt(r.theoretical) << ','
            << opt(r.relative) << '\n';
    }
}

[[nodiscard]] inline nlohmann::json results_to_json(const SweepResult& result) {
    const auto num = [](const std::optional<double>& v) -> nlohmann::json {
        return v ? nlohmann::json(round_to_9_digits(*v)) : nlohmann::json(nullptr);
    };
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : result.records) {
        records.push_back({{"label", r.label},
                           {"window", r.window},
                           {"rate", round_to_9_digits(r.rate)},
                           {"replicate", r.replicate},
                           {"metric", r.metric},
                           {"empirical", round_to_9_digits(r.empirical)},
                           {"theoretical", num(r.theoretical)},
                           {"relative", num(r.relative)}});
    }
    return nlohmann::json{{"metadata", result.metadata}, {"records", std::move(records)}};
}

inline void write_results_json(const SweepResult& result, std::ostream& out) {
    out << results_to_json(result).dump(2) << '\n';
}

enum class OutputFormat { csv, json };

[[nodiscard]] inline OutputFormat parse_format(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    fail_argument("unknown format '" + s + "' (expected csv or json)");
}

inline void emit_results(const SweepResult& result, const std::filesystem::path& path, OutputFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    if (format == OutputFormat::csv) {
        write_results_csv(result, out);
    } else {
        write_results_json(result, out);
    }
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

[[nodiscard]] inline SweepResult read_results_csv(std::istream& in) {
    SweepResult result;
    std::string line;
    std::vector<std::string> f;
    if (!std::getline(in, line) || line != kResultsHeader) fail_argument("results CSV: unexpected header");
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (!split_csv_line(line, f) || f.size() != 8) {
            fail_argument("results CSV: malformed row at line " + std::to_string(line_no));
        }
        SweepRecord r;
        r.label = f[0];
        r.window = std::stoull(f[1]);
        r.rate = std::stod(f[2]);
        r.replicate = std::stoull(f[3]);
        r.metric = f[4];
        r.empirical = std::stod(f[5]);
        if (!f[6].empty()) r.theoretical = std::stod(f[6]);
        if (!f[7].empty()) r.relative = std::stod(f[7]);
        result.records.push_back(std::move(r));
    }
    return result;
}

[[nodiscard]] inline SweepResult read_results_json(const nlohmann::json& j) {
    SweepResult result;
    result.metadata = j.value("metadata", nlohmann::json::object());
    for (const auto& e : j.at("records")) {
        SweepRecord r;
        r.label = e.at("label").get<std::string>();
        r.window = e.at("window").get<std::size_t>();
        r.rate = e.at("rate").get<double>();
        r.replicate = e.at("replicate").get<std::size_t>();
        r.metric = e.at("metric").get<std::string>();
        r.empirical = e.at("empirical").get<double>();
        if (!e.at("theoretical").is_null()) r.theoretical = e.at("theoretical").get<double>();
        if (!e.at("relative").is_null()) r.relative = e.at("relative").get<double>();
        result.records.push_back(std::move(r));
    }
    return result;
}

}  // namespace thinpred
