#include "rnnp/forecast.hpp"

#include <cmath>
#include <json.hpp>
#include <set>
#include <sstream>

#include "rnnp/error.hpp"

namespace rnnp {

using nlohmann::json;

RowRange year_rows(const HourlySeries& series, int first_year, int last_year) {
    if (first_year > last_year) throw ConfigError("year_rows: first year after last year");
    const HourIndex lo = first_hour_of_year(first_year);
    const HourIndex hi = first_hour_of_year(last_year + 1);
    if (series.empty() || lo < series.hours.front() || hi - 1 > series.hours.back()) {
        throw DataError("series does not cover years " + std::to_string(first_year) + "-" + std::to_string(last_year));
    }
    return {series.index_of(lo), series.index_of(hi - 1) + 1};
}

PreparedData prepare_pipeline(const HourlySeries& series, RowRange train, const HolidayCalendar& holidays,
                              const PipelineConfig& config) {
    series.validate();
    if (train.begin >= train.end || train.end > series.size()) throw DataError("pipeline: invalid training range");
    PreparedData data;
    PipelineModel& m = data.model;
    m.spec = RnnSpec{config.lags, kFeatureDim, config.hidden_dim, config.head.output_dim()};
    m.spec.validate();
    m.head = config.head;
    m.head.check(m.spec);
    if (config.tau < 1) throw ConfigError("pipeline: tau must be >= 1");
    m.tau = config.tau;
    m.params = ModelParams::zeros(m.spec);
    m.norm = fit_normalization(series, train.begin, train.end);
    m.encoder = FeatureEncoder::fit(series, train.begin, train.end, holidays);

    std::vector<double> z(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) z[i] = quantize(m.norm.to_z(series.demand_mwh[i]));
    m.seasonal = fit_seasonal(series.hours, z, train.begin, train.end, holidays, config.seasonal);
    data.residuals = deseasonalize(series, m.norm, m.seasonal);
    data.features = m.encoder.encode_all(series);
    return data;
}

std::vector<SequenceSample> PreparedData::training_windows(RowRange train, std::size_t stride) const {
    return make_windows(features, residuals.r, model.tau, train.begin, train.end, stride);
}

std::vector<SequenceSample> PreparedData::evaluation_windows(RowRange range) const {
    const std::size_t lookback = model.tau - 1;
    if (range.begin < lookback) throw DataError("pipeline: evaluation range lacks lookback rows");
    if (range.begin >= range.end || range.end > features.size()) throw DataError("pipeline: invalid evaluation range");
    return make_windows(features, residuals.r, model.tau, range.begin - lookback, range.end, 1);
}

PipelineFit fit_pipeline(const HourlySeries& series, RowRange train, std::optional<RowRange> validation,
                         const HolidayCalendar& holidays, const PipelineConfig& config, const EpochCallback& on_epoch) {
    PreparedData data = prepare_pipeline(series, train, holidays, config);
    const auto training = data.training_windows(train, config.stride);
    std::vector<SequenceSample> val;
    if (validation) val = data.evaluation_windows(*validation);

    PipelineFit fit;
    fit.training_windows = training.size();
    fit.validation_windows = val.size();
    Rng rng(config.train.seed);
    const ModelParams init = init_params(data.model.spec, rng);
    fit.training = rnnp::train(init, data.model.spec, training, data.model.head, config.train, val, on_epoch);
    fit.model = std::move(data.model);
    fit.model.params = fit.training.params;
    return fit;
}

std::vector<ForecastPoint> forecast_range(const PipelineModel& model, const HourlySeries& exogenous, std::size_t begin,
                                          std::size_t end) {
    model.spec.validate();
    model.params.check_shape(model.spec);
    if (begin > end || end > exogenous.size()) throw DataError("forecast: invalid row range");
    if (begin + 1 < model.tau) {
        throw DataError("forecast: missing exogenous rows, need " + std::to_string(model.tau - 1) +
                        " rows before the first forecast hour");
    }
    const std::vector<Vector> features = model.encoder.encode_all(exogenous);
    std::vector<ForecastPoint> out;
    out.reserve(end - begin);
    for (std::size_t t = begin; t < end; ++t) {
        const std::span<const Vector> window(features.data() + (t + 1 - model.tau), model.tau);
        const Vector y = predict_final(model.params, model.spec, window);
        if (!y.all_finite()) throw NumericError("forecast: non-finite network output at " + format_timestamp(exogenous.hours[t]));
        ForecastPoint p;
        p.hour = exogenous.hours[t];
        p.seasonal = model.seasonal.fitted(p.hour);
        p.mu = y[0];
        p.sigma = model.head.kind == LossKind::GaussianNll ? head_sigma(y, model.head) : 0.0;
        p.distribution.mu_log = model.norm.log_from_z(p.seasonal + p.mu);
        p.distribution.sigma_log = model.norm.std * p.sigma;
        p.point = model.head.kind == LossKind::GaussianNll ? p.distribution.mean() : p.distribution.median();
        out.push_back(p);
    }
    return out;
}

std::vector<ForecastPoint> forecast_year(const PipelineModel& model, const HourlySeries& exogenous, int year) {
    const RowRange rows = year_rows(exogenous, year, year);
    return forecast_range(model, exogenous, rows.begin, rows.end);
}

std::string forecast_csv(const std::vector<ForecastPoint>& points) {
    std::ostringstream out;
    out.precision(17);
    out << "timestamp,point,mu_log,sigma_log,q05,q95\n";
    for (const auto& p : points) {
        const double q05 = p.distribution.sigma_log > 0.0 ? p.distribution.quantile(0.05) : p.point;
        const double q95 = p.distribution.sigma_log > 0.0 ? p.distribution.quantile(0.95) : p.point;
        out << format_timestamp(p.hour) << ',' << p.point << ',' << p.distribution.mu_log << ','
            << p.distribution.sigma_log << ',' << q05 << ',' << q95 << '\n';
    }
    return out.str();
}

std::vector<ForecastPoint> parse_forecast_csv(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    std::vector<ForecastPoint> out;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        const std::string where = source + ":" + std::to_string(lineno);
        if (!header) {
            header = true;
            if (f.size() != 6 || f[0] != "timestamp" || f[1] != "point" || f[2] != "mu_log" || f[3] != "sigma_log") {
                throw DataError(where + ": expected header timestamp,point,mu_log,sigma_log,q05,q95");
            }
            continue;
        }
        if (f.size() != 6) throw DataError(where + ": expected 6 fields");
        try {
            ForecastPoint p;
            p.hour = parse_timestamp(f[0]);
            p.point = parse_double(f[1], "point");
            p.distribution.mu_log = parse_double(f[2], "mu_log");
            p.distribution.sigma_log = parse_double(f[3], "sigma_log");
            if (p.distribution.sigma_log < 0.0) throw DataError("negative sigma_log");
            out.push_back(p);
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        }
    }
    if (out.empty()) throw DataError(source + ": no rows");
    return out;
}

Checkpoint to_checkpoint(const PipelineModel& model) {
    Checkpoint ck;
    ck.spec = model.spec;
    ck.params = pack(model.params);
    ck.normalization = {{"log_demand_mean", model.norm.mean},        {"log_demand_std", model.norm.std},
                        {"drybulb_mean", model.encoder.temp_mean[0]}, {"drybulb_std", model.encoder.temp_std[0]},
                        {"wetbulb_mean", model.encoder.temp_mean[1]}, {"wetbulb_std", model.encoder.temp_std[1]}};
    json ext;
    ext["kind"] = "pipeline";
    ext["loss_head"] = to_string(model.head.kind);
    ext["sigma_floor"] = model.head.sigma_floor;
    ext["tau"] = model.tau;
    const auto& sc = model.seasonal.config;
    ext["seasonal"] = {{"day_of_week", sc.day_of_week},
                       {"holiday", sc.holiday},
                       {"harmonics", sc.harmonics},
                       {"trend", sc.trend},
                       {"origin", format_timestamp(model.seasonal.origin_hour)},
                       {"coefficients", model.seasonal.coefficients},
                       {"dropped", model.seasonal.dropped}};
    std::vector<std::string> dates;
    for (const DayIndex d : model.encoder.holidays.days()) dates.push_back(format_date(d));
    ext["holidays"] = dates;
    ck.extension = ext.dump();
    return ck;
}

PipelineModel from_checkpoint(const Checkpoint& ck) {
    PipelineModel m;
    try {
        const json ext = json::parse(ck.extension);
        if (ext.value("kind", "") != "pipeline") throw DataError("checkpoint does not hold a forecasting pipeline");
        m.spec = ck.spec;
        m.params = unpack(ck.spec, ck.params);
        m.head.kind = parse_loss_kind(ext.at("loss_head").get<std::string>());
        m.head.sigma_floor = ext.at("sigma_floor").get<double>();
        m.head.check(m.spec);
        m.tau = ext.at("tau").get<std::size_t>();
        auto stat = [&](const char* key) {
            const auto it = ck.normalization.find(key);
            if (it == ck.normalization.end()) throw DataError(std::string("checkpoint lacks normalization '") + key + "'");
            return it->second;
        };
        m.norm = {stat("log_demand_mean"), stat("log_demand_std")};
        std::set<DayIndex> days;
        for (const auto& d : ext.at("holidays")) days.insert(parse_date(d.get<std::string>()));
        HolidayCalendar holidays(std::move(days));
        m.encoder.holidays = holidays;
        m.encoder.temp_mean = {stat("drybulb_mean"), stat("wetbulb_mean")};
        m.encoder.temp_std = {stat("drybulb_std"), stat("wetbulb_std")};
        const json& s = ext.at("seasonal");
        m.seasonal.config.day_of_week = s.at("day_of_week").get<bool>();
        m.seasonal.config.holiday = s.at("holiday").get<bool>();
        m.seasonal.config.harmonics = s.at("harmonics").get<unsigned>();
        m.seasonal.config.trend = s.at("trend").get<bool>();
        m.seasonal.origin_hour = parse_timestamp(s.at("origin").get<std::string>());
        m.seasonal.holidays = holidays;
        m.seasonal.coefficients = s.at("coefficients").get<std::array<std::vector<double>, 24>>();
        m.seasonal.dropped = s.at("dropped").get<std::array<std::vector<std::size_t>, 24>>();
        for (const auto& c : m.seasonal.coefficients) {
            if (c.size() != m.seasonal.config.regressor_count()) throw DataError("checkpoint: seasonal coefficient count");
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("checkpoint: malformed pipeline extension: ") + e.what());
    }
    return m;
}

void save_pipeline(const PipelineModel& model, const std::filesystem::path& path) {
    save_checkpoint(to_checkpoint(model), path);
}

PipelineModel load_pipeline(const std::filesystem::path& path) { return from_checkpoint(load_checkpoint(path)); }

}  // namespace rnnp
