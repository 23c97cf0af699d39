#include "rnnp_cli/config.hpp"

#include <json.hpp>
#include <set>

#include "rnnp/error.hpp"
#include "rnnp/series.hpp"

namespace rnnp::cli {

using nlohmann::json;

namespace {

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

std::vector<std::size_t> read_lags(const json& v, const std::string& where) {
    std::vector<std::size_t> lags;
    try {
        if (v.is_string()) return parse_lags(v.get<std::string>());
        lags = v.get<std::vector<std::size_t>>();
    } catch (const json::exception&) {
        throw ConfigError(where + ": expected a list of lags");
    }
    RnnSpec{lags, 1, 1, 1}.validate();
    return lags;
}

std::vector<std::vector<std::size_t>> read_lag_sets(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a non-empty list of lag sets");
    std::vector<std::vector<std::size_t>> out;
    for (const auto& item : v) out.push_back(read_lags(item, where));
    return out;
}

void parse_synth(const json& j, SynthConfig& s) {
    const std::string w = "synth";
    only_keys(j, w,
              {"start_year", "years", "base_mwh", "trend_per_year", "daily_amplitude", "daily_amplitude2",
               "saturday_effect", "sunday_effect", "yearly_amplitude", "yearly_amplitude2", "holiday_effect",
               "temp_mean_f", "temp_yearly_f", "temp_daily_f", "anomaly_phi", "anomaly_sd_f", "wetbulb_offset_f",
               "wetbulb_sd_f", "ar_phi1", "ar_phi24", "ar_gamma", "noise_sigma", "seed"});
    read(j, "start_year", s.start_year, w);
    read(j, "years", s.years, w);
    read(j, "base_mwh", s.base_mwh, w);
    read(j, "trend_per_year", s.trend_per_year, w);
    read(j, "daily_amplitude", s.daily_amplitude, w);
    read(j, "daily_amplitude2", s.daily_amplitude2, w);
    read(j, "saturday_effect", s.saturday_effect, w);
    read(j, "sunday_effect", s.sunday_effect, w);
    read(j, "yearly_amplitude", s.yearly_amplitude, w);
    read(j, "yearly_amplitude2", s.yearly_amplitude2, w);
    read(j, "holiday_effect", s.holiday_effect, w);
    read(j, "temp_mean_f", s.temp_mean_f, w);
    read(j, "temp_yearly_f", s.temp_yearly_f, w);
    read(j, "temp_daily_f", s.temp_daily_f, w);
    read(j, "anomaly_phi", s.anomaly_phi, w);
    read(j, "anomaly_sd_f", s.anomaly_sd_f, w);
    read(j, "wetbulb_offset_f", s.wetbulb_offset_f, w);
    read(j, "wetbulb_sd_f", s.wetbulb_sd_f, w);
    read(j, "ar_phi1", s.ar_phi1, w);
    read(j, "ar_phi24", s.ar_phi24, w);
    read(j, "ar_gamma", s.ar_gamma, w);
    read(j, "noise_sigma", s.noise_sigma, w);
    read(j, "seed", s.seed, w);
    s.validate();
}

void parse_train(const json& j, TrainConfig& t) {
    const std::string w = "pipeline.train";
    only_keys(j, w,
              {"learning_rate", "batch_size", "max_epochs", "patience", "adam_beta1", "adam_beta2", "adam_eps",
               "seed", "engine", "bptt_guard"});
    read(j, "learning_rate", t.learning_rate, w);
    read(j, "batch_size", t.batch_size, w);
    read(j, "max_epochs", t.max_epochs, w);
    read(j, "patience", t.patience, w);
    read(j, "adam_beta1", t.adam_beta1, w);
    read(j, "adam_beta2", t.adam_beta2, w);
    read(j, "adam_eps", t.adam_eps, w);
    read(j, "seed", t.seed, w);
    read(j, "bptt_guard", t.bptt_guard, w);
    if (j.contains("engine")) {
        std::string e;
        read(j, "engine", e, w);
        t.engine = parse_engine(e);
    }
    t.validate();
}

void parse_pipeline(const json& j, PipelineConfig& p) {
    const std::string w = "pipeline";
    only_keys(j, w, {"lags", "hidden_dim", "loss_head", "sigma_floor", "tau", "stride", "seasonal", "train"});
    if (j.contains("lags")) p.lags = read_lags(j.at("lags"), w + ".lags");
    read(j, "hidden_dim", p.hidden_dim, w);
    if (j.contains("loss_head")) {
        std::string head;
        read(j, "loss_head", head, w);
        p.head.kind = parse_loss_kind(head);
    }
    read(j, "sigma_floor", p.head.sigma_floor, w);
    read(j, "tau", p.tau, w);
    read(j, "stride", p.stride, w);
    if (p.hidden_dim < 1 || p.tau < 1 || p.stride < 1) throw ConfigError(w + ": hidden_dim, tau and stride must be >= 1");
    if (!(p.head.sigma_floor > 0.0)) throw ConfigError(w + ".sigma_floor must be > 0");
    if (j.contains("seasonal")) {
        const json& s = j.at("seasonal");
        only_keys(s, w + ".seasonal", {"day_of_week", "holiday", "harmonics", "trend"});
        read(s, "day_of_week", p.seasonal.day_of_week, w + ".seasonal");
        read(s, "holiday", p.seasonal.holiday, w + ".seasonal");
        read(s, "harmonics", p.seasonal.harmonics, w + ".seasonal");
        read(s, "trend", p.seasonal.trend, w + ".seasonal");
    }
    if (j.contains("train")) parse_train(j.at("train"), p.train);
}

}  // namespace

CliConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    CliConfig c;
    only_keys(j, "config", {"seed", "holidays", "synth", "pipeline", "split", "grid", "walk_forward", "bench"});
    if (j.contains("seed")) {
        std::uint64_t seed = 0;
        read(j, "seed", seed, "config");
        apply_seed(c, seed);
    }
    if (j.contains("holidays")) {
        std::string path;
        read(j, "holidays", path, "config");
        c.holidays = path;
    }
    if (j.contains("synth")) parse_synth(j.at("synth"), c.synth);
    if (j.contains("pipeline")) parse_pipeline(j.at("pipeline"), c.pipeline);
    if (j.contains("split")) {
        const json& s = j.at("split");
        only_keys(s, "split", {"train_first_year", "train_last_year", "validation_year"});
        read(s, "train_first_year", c.split.train_first_year, "split");
        read(s, "train_last_year", c.split.train_last_year, "split");
        if (s.contains("validation_year")) {
            if (s.at("validation_year").is_null()) {
                c.split.validation_year.reset();
            } else {
                int y = 0;
                read(s, "validation_year", y, "split");
                c.split.validation_year = y;
            }
        }
        if (c.split.train_first_year > c.split.train_last_year) throw ConfigError("split: first year after last year");
    }
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        only_keys(g, "grid", {"hidden_dims", "learning_rates", "batch_sizes"});
        read(g, "hidden_dims", c.grid.hidden_dims, "grid");
        read(g, "learning_rates", c.grid.learning_rates, "grid");
        read(g, "batch_sizes", c.grid.batch_sizes, "grid");
        if (c.grid.size() == 0) throw ConfigError("grid: every axis needs at least one value");
    }
    if (j.contains("walk_forward")) {
        const json& w = j.at("walk_forward");
        only_keys(w, "walk_forward", {"first_year", "last_year", "train_years", "lag_sets"});
        read(w, "first_year", c.walk_forward.first_year, "walk_forward");
        read(w, "last_year", c.walk_forward.last_year, "walk_forward");
        read(w, "train_years", c.walk_forward.train_years, "walk_forward");
        if (w.contains("lag_sets")) c.walk_forward.lag_sets = read_lag_sets(w.at("lag_sets"), "walk_forward.lag_sets");
    }
    if (j.contains("bench")) {
        const json& b = j.at("bench");
        only_keys(b, "bench",
                  {"engines", "lags", "input_dim", "hidden_dim", "y_dim", "tau_min", "tau_max", "bptt_tau_max",
                   "table_lag_sets", "table_hidden", "table_tau"});
        if (b.contains("engines")) {
            std::vector<std::string> names;
            read(b, "engines", names, "bench");
            c.bench.engines.clear();
            for (const auto& n : names) c.bench.engines.push_back(parse_engine(n));
        }
        if (b.contains("lags")) c.bench.lags = read_lags(b.at("lags"), "bench.lags");
        read(b, "input_dim", c.bench.input_dim, "bench");
        read(b, "hidden_dim", c.bench.hidden_dim, "bench");
        read(b, "y_dim", c.bench.y_dim, "bench");
        read(b, "tau_min", c.bench.tau_min, "bench");
        read(b, "tau_max", c.bench.tau_max, "bench");
        read(b, "bptt_tau_max", c.bench.bptt_tau_max, "bench");
        if (b.contains("table_lag_sets")) c.bench.table_lag_sets = read_lag_sets(b.at("table_lag_sets"), "bench.table_lag_sets");
        read(b, "table_hidden", c.bench.table_hidden, "bench");
        read(b, "table_tau", c.bench.table_tau, "bench");
        if (c.bench.tau_min < 1 || c.bench.tau_min > c.bench.tau_max) throw ConfigError("bench: need 1 <= tau_min <= tau_max");
    }
    return c;
}

CliConfig load_config(const std::filesystem::path& path) {
    try {
        return parse_config(read_text_file(path));
    } catch (const DataError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

void apply_seed(CliConfig& config, std::uint64_t seed) {
    config.seed = seed;
    config.synth.seed = seed;
    config.pipeline.train.seed = seed;
}

}  // namespace rnnp::cli
