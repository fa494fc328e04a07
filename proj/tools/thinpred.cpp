// thinpred command-line front end.
//
// Exit status: 0 on success, 2 for invalid input (bad flags, malformed files,
// statistics that are undefined for the given data), 1 for runtime failures
// such as unreadable or unwritable paths.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "thinpred/thinpred.hpp"

namespace {

using namespace thinpred;
using nlohmann::json;

struct Common {
    std::uint64_t seed = 0;
    std::vector<double> rates;
    std::size_t replicates = 1;
    std::string format = "csv";
    std::string out = "-";
    std::string config;

    CLI::Option* seed_opt = nullptr;
    CLI::Option* replicates_opt = nullptr;
};

void add_common(CLI::App* cmd, Common& c) {
    c.seed_opt = cmd->add_option("--seed", c.seed, "Base seed for every random stream");
    cmd->add_option("--rates", c.rates, "Sampling rates in (0, 1], comma separated")->delimiter(',');
    c.replicates_opt = cmd->add_option("--replicates", c.replicates, "Thinning replicates per rate");
    cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", c.out, "Output path, '-' for stdout");
    cmd->add_option("--config", c.config, "JSON configuration file");
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path);
}

std::string render(const SweepResult& r, const std::string& format) {
    std::ostringstream os;
    if (parse_format(format) == OutputFormat::csv) {
        write_results_csv(r, os);
    } else {
        write_results_json(r, os);
    }
    return os.str();
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        fail_argument(path + ": " + e.what());
    }
}

// Single-metric analyses reuse the sweep machinery with one metric.
struct SeriesArgs {
    std::string input;
    std::string column;
    std::string external_input;
    std::string external_column;
};

void add_series_args(CLI::App* cmd, SeriesArgs& s, bool external) {
    cmd->add_option("--input", s.input, "CSV file with a header row");
    cmd->add_option("--column", s.column, "Column holding the count series");
    if (external) {
        cmd->add_option("--external-column", s.external_column, "Column holding the external series");
        cmd->add_option("--external-input", s.external_input, "CSV for the external series (default: --input)");
    }
}

SweepConfig analysis_config(const Common& c, const SeriesArgs& s, const std::string& metric) {
    SweepConfig cfg;
    if (!c.config.empty()) {
        cfg = load_sweep_config(c.config);
    } else {
        if (s.input.empty() || s.column.empty()) fail_argument("--input and --column are required without --config");
        cfg.source = ColumnSource{s.input, s.column};
        cfg.label = s.column;
    }
    if (!s.external_column.empty()) {
        cfg.external = ColumnSource{s.external_input.empty() ? s.input : s.external_input, s.external_column};
    }
    cfg.metrics = {metric};
    if (!c.rates.empty()) cfg.rates = c.rates;
    if (c.replicates_opt->count() > 0 || c.config.empty()) cfg.replicates = c.replicates;
    if (c.seed_opt->count() > 0 || c.config.empty()) cfg.base_seed = c.seed;
    return cfg;
}

CountSeries load_input(const SeriesArgs& s) {
    if (s.input.empty() || s.column.empty()) fail_argument("--input and --column are required");
    return load_series_csv(s.input, s.column);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Predictability of binomially thinned count time series"};
    app.require_subcommand(1);
    std::function<void()> action;

    // sample ---------------------------------------------------------------
    Common sample_c;
    SeriesArgs sample_s;
    auto* sample = app.add_subcommand("sample", "Thin one series at each rate and replicate");
    add_common(sample, sample_c);
    add_series_args(sample, sample_s, false);
    sample->callback([&] {
        action = [&] {
            const auto x = load_input(sample_s);
            SamplingPlan plan{1.0, sample_c.replicates, sample_c.seed};
            const auto rates = sample_c.rates.empty() ? std::vector<double>{1.0} : sample_c.rates;
            json series = json::array();
            std::ostringstream csv;
            csv << "rate,replicate,t,value\n";
            for (double rate : rates) {
                plan.rate = rate;
                plan.validate();
                const auto ys = replicate_thin(x, plan);
                for (std::size_t r = 0; r < ys.size(); ++r) {
                    for (std::size_t t = 0; t < ys[r].size(); ++t) {
                        csv << format_number(rate) << ',' << r << ',' << t << ',' << format_number(ys[r][t]) << '\n';
                    }
                    series.push_back({{"rate", round_to_9_digits(rate)}, {"replicate", r}, {"values", ys[r].data()}});
                }
            }
            if (sample_c.format == "csv") {
                write_output(sample_c.out, csv.str());
            } else {
                json doc{{"label", x.label()}, {"base_seed", sample_c.seed}, {"series", series}};
                write_output(sample_c.out, doc.dump(2) + "\n");
            }
        };
    });

    // wpe ------------------------------------------------------------------
    Common wpe_c;
    SeriesArgs wpe_s;
    std::optional<int> wpe_order;
    std::optional<int> wpe_delay;
    auto* wpe = app.add_subcommand("wpe", "Weighted permutation entropy, parameters fixed from the unthinned series");
    add_common(wpe, wpe_c);
    add_series_args(wpe, wpe_s, false);
    wpe->add_option("--order", wpe_order, "Pattern order d (default: grid search 2..5)");
    wpe->add_option("--delay", wpe_delay, "Pattern delay tau (default: grid search 1..7)");
    wpe->callback([&] {
        action = [&] {
            auto cfg = analysis_config(wpe_c, wpe_s, "wpe");
            if (wpe_order) cfg.options.ordinal.order_min = cfg.options.ordinal.order_max = *wpe_order;
            if (wpe_delay) cfg.options.ordinal.delay_min = cfg.options.ordinal.delay_max = *wpe_delay;
            write_output(wpe_c.out, render(run_sweep(cfg), wpe_c.format));
        };
    });

    // autocorr -------------------------------------------------------------
    Common ac_c;
    SeriesArgs ac_s;
    std::optional<std::size_t> ac_max_lag;
    auto* ac = app.add_subcommand("autocorr", "Autocorrelation at the dominant lag with the thinning prediction");
    add_common(ac, ac_c);
    add_series_args(ac, ac_s, false);
    ac->add_option("--max-lag", ac_max_lag, "Largest lag searched for the dominant lag (default 20)");
    ac->callback([&] {
        action = [&] {
            auto cfg = analysis_config(ac_c, ac_s, "autocorr");
            if (ac_max_lag) cfg.options.max_lag = *ac_max_lag;
            write_output(ac_c.out, render(run_sweep(cfg), ac_c.format));
        };
    });

    // mi -------------------------------------------------------------------
    Common mi_c;
    SeriesArgs mi_s;
    std::optional<int> mi_bins;
    auto* mi = app.add_subcommand("mi", "Mutual information (nats) between an external series and the thinned series");
    add_common(mi, mi_c);
    add_series_args(mi, mi_s, true);
    mi->add_option("--bins", mi_bins, "Equal-width bins per axis (default ceil(sqrt(n)), at most 32)");
    mi->callback([&] {
        action = [&] {
            auto cfg = analysis_config(mi_c, mi_s, "mi");
            if (mi_bins) cfg.options.mi_bins = *mi_bins;
            write_output(mi_c.out, render(run_sweep(cfg), mi_c.format));
        };
    });

    // theory-curve -----------------------------------------------------------
    Common tc_c;
    SeriesArgs tc_s;
    std::optional<double> tc_var, tc_mean, tc_cross, tc_acf, tc_rho, tc_sigma_s;
    std::optional<std::size_t> tc_lag;
    auto* tc = app.add_subcommand("theory-curve", "Closed-form thinned moments over a grid of rates");
    add_common(tc, tc_c);
    add_series_args(tc, tc_s, false);
    tc->add_option("--variance", tc_var, "Var(X)");
    tc->add_option("--mean", tc_mean, "E[X]");
    tc->add_option("--cross", tc_cross, "Cov(X_t, X_{t+lag})");
    tc->add_option("--autocorr", tc_acf, "Autocorrelation of X at the lag (alternative to --cross)");
    tc->add_option("--lag", tc_lag, "Lag used when estimating from --input (default: dominant lag up to 20)");
    tc->add_option("--rho", tc_rho, "Pearson correlation of X with an external series");
    tc->add_option("--sigma-s", tc_sigma_s, "Standard deviation of the external series (default 1)");
    tc->callback([&] {
        action = [&] {
            double var = 0.0, mean = 0.0, cross = 0.0;
            std::optional<std::size_t> lag;
            if (!tc_s.input.empty()) {
                const auto x = load_input(tc_s);
                const auto m = moments(x);
                var = m.variance;
                mean = m.mean;
                lag = tc_lag ? *tc_lag : dominant_lag(x, std::min<std::size_t>(20, x.size() - 2));
                cross = autocorrelation(x, *lag) * var;
            } else {
                if (!tc_var || !tc_mean) fail_argument("theory-curve needs --variance and --mean, or --input");
                var = *tc_var;
                mean = *tc_mean;
            }
            if (tc_var) var = *tc_var;
            if (tc_mean) mean = *tc_mean;
            if (tc_acf) cross = *tc_acf * var;
            if (tc_cross) cross = *tc_cross;
            std::vector<double> rates = tc_c.rates;
            if (rates.empty()) {
                for (int i = 1; i <= 10; ++i) rates.push_back(i / 10.0);
            }
            const double sigma_s = tc_sigma_s.value_or(1.0);
            std::ostringstream csv;
            csv << "rate,sampled_variance,sampled_cross,predicted_autocorr,autocorr_sq_derivative";
            if (tc_rho) csv << ",predicted_pearson";
            csv << '\n';
            json rows = json::array();
            for (double p : rates) {
                const SampledCovariance sc{var, mean, cross, p};
                const double sv = sampled_variance(sc);
                const double scc = sampled_cross_covariance(sc);
                const double acf = predicted_autocorrelation(sc);
                const double der = autocorrelation_sq_derivative(sc);
                csv << format_number(p) << ',' << format_number(sv) << ',' << format_number(scc) << ','
                    << format_number(acf) << ',' << format_number(der);
                json row{{"rate", round_to_9_digits(p)},
                         {"sampled_variance", round_to_9_digits(sv)},
                         {"sampled_cross", round_to_9_digits(scc)},
                         {"predicted_autocorr", round_to_9_digits(acf)},
                         {"autocorr_sq_derivative", round_to_9_digits(der)}};
                if (tc_rho) {
                    const double pr = predicted_external_pearson(*tc_rho, sc, sigma_s);
                    csv << ',' << format_number(pr);
                    row["predicted_pearson"] = round_to_9_digits(pr);
                }
                csv << '\n';
                rows.push_back(std::move(row));
            }
            if (tc_c.format == "csv") {
                write_output(tc_c.out, csv.str());
            } else {
                json inputs{{"variance", var}, {"mean", mean}, {"cross", cross}};
                if (lag) inputs["lag"] = *lag;
                if (tc_rho) inputs["rho"] = *tc_rho;
                write_output(tc_c.out, json{{"inputs", inputs}, {"rows", rows}}.dump(2) + "\n");
            }
        };
    });

    // synth ------------------------------------------------------------------
    Common syn_c;
    std::optional<std::size_t> syn_length;
    std::string syn_model_out;
    auto* syn = app.add_subcommand("synth", "Generate a coupled (external, ground) pair and its model JSON");
    add_common(syn, syn_c);
    syn->add_option("--length", syn_length, "Series length (default 365)");
    syn->add_option("--model-out", syn_model_out, "Where to write the pair spec JSON (CSV output only)");
    syn->callback([&] {
        action = [&] {
            PairSpec spec;
            if (!syn_c.config.empty()) {
                spec = pair_spec_from_json(read_json_file(syn_c.config));
                if (syn_c.seed_opt->count() > 0) spec.seed = syn_c.seed;
            } else {
                spec = random_pair_spec(syn_c.seed, syn_c.seed);
            }
            if (syn_length) spec.length = *syn_length;
            const auto pair = generate_coupled_pair(spec);
            if (syn_c.format == "csv") {
                std::ostringstream csv;
                csv << "t,external,ground\n";
                for (std::size_t t = 0; t < pair.ground.size(); ++t) {
                    csv << t << ',' << format_number(pair.external[t]) << ',' << format_number(pair.ground[t]) << '\n';
                }
                write_output(syn_c.out, csv.str());
                std::string model_path = syn_model_out;
                if (model_path.empty() && syn_c.out != "-" && !syn_c.out.empty()) model_path = syn_c.out + ".model.json";
                if (!model_path.empty()) write_output(model_path, to_json(spec).dump(2) + "\n");
            } else {
                json doc{{"spec", to_json(spec)},
                         {"external_shift", pair.external_shift},
                         {"ground_shift", pair.ground_shift},
                         {"external", pair.external.data()},
                         {"ground", pair.ground.data()}};
                write_output(syn_c.out, doc.dump(2) + "\n");
            }
        };
    });

    // forecast ---------------------------------------------------------------
    Common fc_c;
    SeriesArgs fc_s;
    double fc_split = 0.7;
    std::optional<std::size_t> fc_ar, fc_ma;
    std::size_t fc_k_max = 3, fc_l_max = 2, fc_refit = 1;
    std::string fc_method = "arma";
    auto* fc = app.add_subcommand("forecast", "Rolling one-step forecasts over the test segment");
    add_common(fc, fc_c);
    add_series_args(fc, fc_s, true);
    fc->add_option("--split", fc_split, "Training fraction (default 0.7)");
    fc->add_option("--ar", fc_ar, "AR order (default: AIC selection)");
    fc->add_option("--ma", fc_ma, "MA order (default: AIC selection)");
    fc->add_option("--k-max", fc_k_max, "Largest AR order tried by AIC");
    fc->add_option("--l-max", fc_l_max, "Largest MA order tried by AIC");
    fc->add_option("--refit-every", fc_refit, "Refit the model every N steps");
    fc->add_option("--method", fc_method, "Predictor")->check(CLI::IsMember({"arma", "poisson"}));
    fc->callback([&] {
        action = [&] {
            CountSeries x = load_input(fc_s);
            if (fc_c.rates.size() > 1) fail_argument("forecast takes at most one rate");
            if (!fc_c.rates.empty()) x = binomial_thin(x, fc_c.rates[0], cell_seed(fc_c.seed, 0, 0, fc_c.rates[0]));
            std::vector<double> ext;
            if (!fc_s.external_column.empty()) {
                ext = load_series_csv(fc_s.external_input.empty() ? fc_s.input : fc_s.external_input,
                                      fc_s.external_column)
                          .data();
            }
            ForecastRun run;
            json model;
            if (fc_method == "poisson") {
                run = poisson_forecast(x, fc_split);
                model = {{"method", "poisson"}};
            } else {
                ArmaOrder order{fc_ar.value_or(0), fc_ma.value_or(0)};
                if (!fc_ar && !fc_ma) {
                    const auto train = static_cast<std::size_t>(fc_split * static_cast<double>(x.size()));
                    const std::span<const double> all(x.data());
                    order = select_order_aic(all.first(train), fc_k_max, fc_l_max,
                                             ext.empty() ? std::span<const double>{}
                                                         : std::span<const double>(ext).first(train));
                }
                run = rolling_forecast(x, fc_split, order, fc_refit, ext);
                const auto& fit = std::get<ArmaFit>(run.model);
                model = {{"method", "arma"},      {"ar_order", order.ar},     {"ma_order", order.ma},
                         {"ar", fit.ar},           {"ma", fit.ma},             {"intercept", fit.intercept},
                         {"noise_std", fit.noise_std}};
                if (fit.external_coef) model["external_coef"] = *fit.external_coef;
            }
            if (fc_c.format == "csv") {
                std::ostringstream os;
                write_forecast_csv(run, os);
                write_output(fc_c.out, os.str());
            } else {
                json rows = json::array();
                for (std::size_t i = 0; i < run.horizon; ++i) {
                    rows.push_back({{"step", run.train_length + i},
                                    {"actual", round_to_9_digits(run.actuals[i])},
                                    {"predicted", round_to_9_digits(run.predictions[i])},
                                    {"residual", round_to_9_digits(run.residuals[i])}});
                }
                json doc{{"model", model}, {"train_length", run.train_length}, {"rows", rows}};
                try {
                    doc["nrmse"] = round_to_9_digits(nrmse(run));
                } catch (const std::domain_error&) {
                    doc["nrmse"] = nullptr;
                }
                write_output(fc_c.out, doc.dump(2) + "\n");
            }
        };
    });

    // archtest ---------------------------------------------------------------
    Common at_c;
    SeriesArgs at_s;
    int at_max_lag = 10;
    bool at_from_forecast = false;
    double at_split = 0.7;
    auto* at = app.add_subcommand("archtest", "Engle LM test for ARCH effects at lags 1..max-lag");
    add_common(at, at_c);
    add_series_args(at, at_s, false);
    at->add_option("--max-lag", at_max_lag, "Largest lag tested");
    at->add_flag("--from-forecast", at_from_forecast,
                 "Treat the column as counts: fit an AIC-selected ARMA, test its rolling forecast residuals");
    at->add_option("--split", at_split, "Training fraction with --from-forecast");
    at->callback([&] {
        action = [&] {
            std::vector<double> resid;
            if (at_from_forecast) {
                CountSeries x = load_input(at_s);
                if (at_c.rates.size() > 1) fail_argument("archtest takes at most one rate");
                if (!at_c.rates.empty()) x = binomial_thin(x, at_c.rates[0], cell_seed(at_c.seed, 0, 0, at_c.rates[0]));
                const auto train = static_cast<std::size_t>(at_split * static_cast<double>(x.size()));
                const std::span<const double> all(x.data());
                const auto order = select_order_aic(all.first(train), 3, 2);
                resid = rolling_forecast(x, at_split, order).residuals;
            } else {
                if (at_s.input.empty() || at_s.column.empty()) fail_argument("--input and --column are required");
                // Residuals may be negative, so read the column without the count check.
                std::ifstream in(at_s.input);
                if (!in) throw std::runtime_error("cannot open " + at_s.input);
                std::string line;
                std::vector<std::string> f;
                std::getline(in, line);
                if (!split_csv_line(line, f)) fail_argument(at_s.input + ": malformed header at line 1");
                const auto it = std::find(f.begin(), f.end(), at_s.column);
                if (it == f.end()) fail_argument(at_s.input + ": column '" + at_s.column + "' not found in header");
                const auto col = static_cast<std::size_t>(it - f.begin());
                std::size_t line_no = 1;
                while (std::getline(in, line)) {
                    ++line_no;
                    if (line.empty()) continue;
                    double v = 0.0;
                    if (!split_csv_line(line, f) || f.size() <= col || !thinpred::detail::parse_double(f[col], v)) {
                        fail_argument(at_s.input + ": line " + std::to_string(line_no) + ": malformed row");
                    }
                    resid.push_back(v);
                }
            }
            const auto result = elm_arch_test(resid, at_max_lag);
            if (at_c.format == "csv") {
                std::ostringstream os;
                write_arch_csv(result, os);
                write_output(at_c.out, os.str());
            } else {
                json rows = json::array();
                for (const auto& r : result.lags) {
                    rows.push_back({{"lag", r.lag},
                                    {"lm", round_to_9_digits(r.lm)},
                                    {"p_value", round_to_9_digits(r.p_value)},
                                    {"n_effective", r.n_effective}});
                }
                json doc{{"max_lag", result.max_lag},
                         {"rejection_fraction", round_to_9_digits(result.rejection_fraction(1, result.max_lag))},
                         {"lags", rows}};
                write_output(at_c.out, doc.dump(2) + "\n");
            }
        };
    });

    // sweep ------------------------------------------------------------------
    Common sw_c;
    auto* sw = app.add_subcommand("sweep", "Full sampling-rate sweep driven by a JSON config");
    add_common(sw, sw_c);
    sw->callback([&] {
        action = [&] {
            if (sw_c.config.empty()) fail_argument("sweep requires --config");
            auto cfg = load_sweep_config(sw_c.config);
            if (!sw_c.rates.empty()) cfg.rates = sw_c.rates;
            if (sw_c.replicates_opt->count() > 0) cfg.replicates = sw_c.replicates;
            if (sw_c.seed_opt->count() > 0) cfg.base_seed = sw_c.seed;
            write_output(sw_c.out, render(run_sweep(cfg), sw_c.format));
        };
    });

    // fixtures ---------------------------------------------------------------
    std::string fx_dir;
    auto* fx = app.add_subcommand("fixtures", "Write the bundled fixtures (CSV + JSON manifest) to a directory");
    fx->add_option("--out", fx_dir, "Target directory")->required();
    fx->callback([&] { action = [&] { write_fixtures(fx_dir); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (action) action();
        return 0;
    } catch (const std::logic_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
