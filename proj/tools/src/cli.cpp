#include "rnnp_cli/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "rnnp/bench.hpp"
#include "rnnp/error.hpp"
#include "rnnp/forecast.hpp"
#include "rnnp/metrics.hpp"
#include "rnnp/pbonacci.hpp"
#include "rnnp/synth.hpp"
#include "rnnp/walk_forward.hpp"
#include "rnnp_cli/config.hpp"

namespace rnnp::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;

    std::string out;
    std::string data;
    std::string model;
    std::string history;
    std::string oracle;
    std::string forecast;
    std::string realized;
    std::string label = "forecast";
    std::string engine;
    std::string report;
    int year = 0;
    std::size_t seeds = 20;
    std::uint64_t first_seed = 1;
    unsigned p = 2;
    std::size_t n = 10;
    bool csv = false;
    bool table = false;
    bool quiet = false;
};

CliConfig resolve_config(const Options& o) {
    CliConfig c = o.config_path.empty() ? CliConfig{} : load_config(o.config_path);
    if (o.seed) apply_seed(c, *o.seed);
    return c;
}

HolidayCalendar holidays_for(const CliConfig& c, const HourlySeries& s) {
    if (c.holidays) return HolidayCalendar::load(*c.holidays);
    return HolidayCalendar::us_federal(to_civil(s.hours.front()).year, to_civil(s.hours.back()).year);
}

void ensure_parent(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    ensure_parent(path);
    write_text_file(path, text);
}

int cmd_synth(const Options& o, std::ostream& out) {
    const CliConfig c = resolve_config(o);
    const SynthResult r = synth_generate(c.synth);
    write_output(o.out, to_csv(r.series), out);
    if (!o.oracle.empty()) {
        std::ostringstream ss;
        ss.precision(17);
        ss << "timestamp,signal_mwh\n";
        for (std::size_t i = 0; i < r.series.size(); ++i) {
            ss << format_timestamp(r.series.hours[i]) << ',' << std::exp(r.signal_log[i]) << '\n';
        }
        write_output(o.oracle, ss.str(), out);
    }
    return kOk;
}

int cmd_train(const Options& o, std::ostream& out) {
    CliConfig c = resolve_config(o);
    if (!o.engine.empty()) c.pipeline.train.engine = parse_engine(o.engine);
    const HourlySeries series = ingest_csv(o.data);
    const RowRange train = year_rows(series, c.split.train_first_year, c.split.train_last_year);
    std::optional<RowRange> val;
    if (c.split.validation_year) val = year_rows(series, *c.split.validation_year, *c.split.validation_year);
    const bool quiet = o.quiet;
    const PipelineFit fit = fit_pipeline(series, train, val, holidays_for(c, series), c.pipeline,
                                         [&](const EpochRecord& r) {
                                             if (quiet) return;
                                             out << "epoch " << r.epoch << " train_loss " << r.train_loss;
                                             if (r.val_loss) out << " val_loss " << *r.val_loss;
                                             out << '\n';
                                         });
    ensure_parent(o.model);
    save_pipeline(fit.model, o.model);
    if (!o.history.empty()) write_output(o.history, history_csv(fit.training.history), out);
    out << "trained " << format_lags(fit.model.spec.lags) << " on " << fit.training_windows << " windows; best epoch "
        << fit.training.best_epoch << " (loss " << fit.training.best_loss << ")\n";
    return kOk;
}

int cmd_forecast(const Options& o, std::ostream& out) {
    const PipelineModel model = load_pipeline(o.model);
    const HourlySeries exo = ingest_csv(o.data, false);
    const auto points = forecast_year(model, exo, o.year);
    write_output(o.out, forecast_csv(points), out);
    return kOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
    const auto points = parse_forecast_csv(read_text_file(o.forecast), o.forecast);
    const HourlySeries realized = ingest_csv(o.realized);
    std::vector<double> point, actual;
    std::vector<LognormalForecast> dist;
    for (const auto& p : points) {
        point.push_back(p.point);
        dist.push_back(p.distribution);
        actual.push_back(realized.demand_mwh[realized.index_of(p.hour)]);
    }
    const MetricReport report = evaluate_forecasts(o.label, point, dist, actual);
    out << format_metric_table({report});
    if (!o.out.empty()) write_output(o.out, report.to_json() + "\n", out);
    return kOk;
}

int cmd_gradcheck(const Options& o, std::ostream& out) {
    const auto rows = run_gradcheck(o.first_seed, o.seeds);
    std::size_t failures = 0;
    for (const auto& r : rows) failures += r.pass ? 0 : 1;
    if (!o.out.empty()) write_output(o.out, gradcheck_csv(rows), out);
    out << "gradcheck: " << o.seeds << " seeds, " << rows.size() << " comparisons, " << failures << " failures\n";
    return failures == 0 ? kOk : kAcceptanceFailure;
}

int cmd_bench(const Options& o, std::ostream& out) {
    const CliConfig c = resolve_config(o);
    const BenchConfig& b = c.bench;
    if (o.table) {
        const auto rows = sweep_neurons(b.table_lag_sets, b.table_hidden, b.table_tau, b.y_dim, b.input_dim, c.seed);
        out << format_neuron_table(rows);
        if (!o.out.empty()) {
            std::vector<BenchRecord> records;
            for (const auto& r : rows) {
                records.push_back(r.trrl);
                records.push_back(r.rtrl);
            }
            ensure_parent(o.out);
            emit_csv(records, o.out);
        }
        return kOk;
    }
    const RnnSpec spec{b.lags, b.input_dim, b.hidden_dim, b.y_dim};
    std::vector<BenchRecord> records;
    for (const Engine e : b.engines) {
        std::vector<std::size_t> taus;
        const std::size_t hi = e == Engine::Bptt ? std::min(b.tau_max, b.bptt_tau_max) : b.tau_max;
        for (std::size_t t = b.tau_min; t <= hi; ++t) taus.push_back(t);
        const auto r = sweep_tau(e, spec, taus, c.seed);
        records.insert(records.end(), r.begin(), r.end());
    }
    if (o.out.empty()) {
        out << bench_csv(records);
    } else {
        ensure_parent(o.out);
        emit_csv(records, o.out);
    }
    return kOk;
}

std::string u128(uint128 v) { return to_string(v); }

int cmd_pbonacci(const Options& o, std::ostream& out) {
    const PbonacciTable t = build_table(o.p, o.n);
    const BoundReport bounds = check_bounds(t);
    std::optional<DoublingReport> doubling;
    if (t.size() >= 2) doubling = monotone_doubling_check(t);
    auto doubling_cell = [&](std::size_t n) -> std::string {
        if (!doubling || n < 2) return "-";
        const auto& r = doubling->rows[n - 2];
        return r.ok() ? (r.equality ? "eq" : "lt") : "FAIL";
    };
    if (o.csv) {
        out << "n,x_n,s_n,lower_ok,upper_ok,doubling\n";
        for (std::size_t n = 1; n <= t.size(); ++n) {
            const auto& b = bounds.rows[n - 1];
            out << n << ',' << u128(t.x(n)) << ',' << u128(t.s(n)) << ',' << b.lower_ok << ',' << b.upper_ok << ','
                << doubling_cell(n) << '\n';
        }
        return kOk;
    }
    char line[256];
    std::snprintf(line, sizeof line, "%4s %40s %40s %6s %6s %9s\n", "n", "X_n", "S_n", "lower", "upper", "S_n/S_n-1");
    out << line;
    for (std::size_t n = 1; n <= t.size(); ++n) {
        const auto& b = bounds.rows[n - 1];
        std::snprintf(line, sizeof line, "%4zu %40s %40s %6s %6s %9s\n", n, u128(t.x(n)).c_str(), u128(t.s(n)).c_str(),
                      b.lower_ok ? "ok" : "FAIL", b.upper_ok ? "ok" : "FAIL", doubling_cell(n).c_str());
        out << line;
    }
    out << "S_" << t.size() << " = " << u128(t.s(t.size())) << "\n";
    if (o.p == 2) {
        const IdentityPair id = fibonacci_sum_identity(t.size());
        out << "sum F_1..F_" << t.size() << " = " << u128(id.lhs) << ", F_" << t.size() + 2 << " - 1 = " << u128(id.rhs)
            << (id.lhs == id.rhs ? " (identity holds)" : " (IDENTITY FAILS)") << "\n";
    }
    const bool ok = bounds.all_ok() && (!doubling || doubling->all_ok());
    out << "bounds: " << (ok ? "all hold" : "VIOLATED") << "\n";
    return ok ? kOk : kAcceptanceFailure;
}

int cmd_walk_forward(const Options& o, std::ostream& out) {
    const CliConfig c = resolve_config(o);
    const HourlySeries series = ingest_csv(o.data);
    const auto plan = WalkForwardPlan::rolling(c.walk_forward.first_year, c.walk_forward.last_year,
                                               c.walk_forward.train_years);
    const auto report = run_walk_forward(series, plan, c.walk_forward.lag_sets, c.grid, holidays_for(c, series),
                                         c.pipeline);
    out << report.to_table();
    if (!o.out.empty()) write_output(o.out, report.to_json() + "\n", out);
    return kOk;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"rnnp: RNN(p) models, gradient engines and load forecasting"};
    app.require_subcommand(1);
    Options o;

    auto with_config = [&](CLI::App* sub) {
        sub->add_option("-c,--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "root seed (overrides the config)");
    };

    auto* synth = app.add_subcommand("synth", "generate a synthetic hourly series");
    with_config(synth);
    synth->add_option("-o,--out", o.out, "output CSV (default stdout)");
    synth->add_option("--oracle", o.oracle, "also write the noise-free signal");

    auto* train = app.add_subcommand("train", "fit the seasonal model and the network");
    with_config(train);
    train->add_option("-d,--data", o.data, "input CSV")->required();
    train->add_option("-m,--model", o.model, "checkpoint to write")->required();
    train->add_option("--history", o.history, "training history CSV");
    train->add_option("--engine", o.engine, "gradient engine: trrl, rtrl or bptt");
    train->add_flag("-q,--quiet", o.quiet, "no per-epoch lines");

    auto* forecast = app.add_subcommand("forecast", "forecast one year from a checkpoint");
    forecast->add_option("-m,--model", o.model, "checkpoint")->required()->check(CLI::ExistingFile);
    forecast->add_option("-d,--data", o.data, "exogenous CSV (demand may be empty)")->required();
    forecast->add_option("-y,--year", o.year, "year to forecast")->required();
    forecast->add_option("-o,--out", o.out, "forecast CSV (default stdout)");

    auto* evaluate = app.add_subcommand("evaluate", "score a forecast against realized demand");
    evaluate->add_option("-f,--forecast", o.forecast, "forecast CSV")->required()->check(CLI::ExistingFile);
    evaluate->add_option("-r,--realized", o.realized, "realized series CSV")->required()->check(CLI::ExistingFile);
    evaluate->add_option("-l,--label", o.label, "row label");
    evaluate->add_option("-o,--out", o.out, "JSON report");

    auto* gradcheck = app.add_subcommand("gradcheck", "cross-engine and finite-difference gradient check");
    gradcheck->add_option("--seeds", o.seeds, "number of random instances")->check(CLI::PositiveNumber);
    gradcheck->add_option("--first-seed", o.first_seed, "first seed");
    gradcheck->add_option("-o,--out", o.out, "CSV report");

    auto* bench = app.add_subcommand("bench", "operation-count sweeps");
    with_config(bench);
    bench->add_flag("--table", o.table, "lag-set by hidden-size table with the gain factor");
    bench->add_option("-o,--out", o.out, "CSV records (default stdout)");

    auto* pbon = app.add_subcommand("pbonacci", "p-bonacci table, identity and bounds");
    pbon->add_option("-p,--p", o.p, "order p >= 2")->check(CLI::Range(2u, 64u));
    pbon->add_option("-n,--n", o.n, "number of terms")->check(CLI::Range(std::size_t{1}, std::size_t{400}));
    pbon->add_flag("--csv", o.csv, "CSV instead of aligned text");

    auto* wf = app.add_subcommand("walkforward", "grid search then rolling retrain/test");
    with_config(wf);
    wf->add_option("-d,--data", o.data, "input CSV")->required();
    wf->add_option("-o,--out", o.out, "JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*synth) return cmd_synth(o, out);
        if (*train) return cmd_train(o, out);
        if (*forecast) return cmd_forecast(o, out);
        if (*evaluate) return cmd_evaluate(o, out);
        if (*gradcheck) return cmd_gradcheck(o, out);
        if (*bench) return cmd_bench(o, out);
        if (*pbon) return cmd_pbonacci(o, out);
        if (*wf) return cmd_walk_forward(o, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kNumericError;
    } catch (const fs::filesystem_error& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUnexpected;
    }
    return kConfigError;
}

}  // namespace rnnp::cli
