#include "rnnp/walk_forward.hpp"

#include <cstdio>
#include <json.hpp>

#include "rnnp/error.hpp"

namespace rnnp {

WalkForwardPlan WalkForwardPlan::rolling(int first_year, int last_year, int train_years) {
    if (train_years < 1) throw ConfigError("walk-forward: train_years must be >= 1");
    if (last_year - first_year < train_years) {
        throw ConfigError("walk-forward: need at least " + std::to_string(train_years + 1) + " years of data");
    }
    WalkForwardPlan plan;
    plan.splits.push_back({first_year, first_year + train_years - 1, first_year + train_years});
    for (int year = first_year + train_years + 1; year <= last_year; ++year) {
        plan.splits.push_back({year - train_years, year - 1, year});
    }
    return plan;
}

namespace {

MetricReport score(const std::string& label, const std::vector<ForecastPoint>& points, const HourlySeries& series,
                   std::size_t begin) {
    std::vector<double> point, realized;
    std::vector<LognormalForecast> dist;
    for (std::size_t i = 0; i < points.size(); ++i) {
        point.push_back(points[i].point);
        dist.push_back(points[i].distribution);
        realized.push_back(series.demand_mwh[begin + i]);
    }
    return evaluate_forecasts(label, point, dist, realized);
}

}  // namespace

WalkForwardReport run_walk_forward(const HourlySeries& series, const WalkForwardPlan& plan,
                                   const std::vector<std::vector<std::size_t>>& lag_sets, const GridAxis& grid,
                                   const HolidayCalendar& holidays, const PipelineConfig& base) {
    if (plan.splits.empty()) throw ConfigError("walk-forward: empty plan");
    if (lag_sets.empty()) throw ConfigError("walk-forward: no lag sets");
    WalkForwardReport report;
    const WalkForwardSplit& sel = plan.splits.front();
    const RowRange sel_train = year_rows(series, sel.train_first_year, sel.train_last_year);
    const RowRange sel_eval = year_rows(series, sel.eval_year, sel.eval_year);

    for (const auto& lags : lag_sets) {
        PipelineConfig cfg = base;
        cfg.lags = lags;
        const PreparedData data = prepare_pipeline(series, sel_train, holidays, cfg);
        const auto training = data.training_windows(sel_train, cfg.stride);
        const auto validation = data.evaluation_windows(sel_eval);
        RnnSpec spec = data.model.spec;
        report.grids.push_back(grid_search(spec, training, validation, cfg.head, cfg.train, grid));
        const GridSearchReport& gs = report.grids.back();
        const GridCell& best = gs.best();
        if (!best.error.empty()) throw NumericError("walk-forward: every grid cell failed for lag set " + format_lags(lags));

        cfg.hidden_dim = best.hidden_dim;
        cfg.train.learning_rate = best.learning_rate;
        cfg.train.batch_size = best.batch_size;
        cfg.train.max_epochs = std::max<std::size_t>(1, best.best_epoch);

        const std::size_t first_test = plan.splits.size() > 1 ? 1 : 0;
        for (std::size_t s = first_test; s < plan.splits.size(); ++s) {
            const WalkForwardSplit& split = plan.splits[s];
            const RowRange train = year_rows(series, split.train_first_year, split.train_last_year);
            const RowRange eval = year_rows(series, split.eval_year, split.eval_year);
            const PipelineFit fit = fit_pipeline(series, train, std::nullopt, holidays, cfg);
            const auto points = forecast_range(fit.model, series, eval.begin, eval.end);
            WalkForwardRow row;
            row.lag_set = format_lags(lags);
            row.year = split.eval_year;
            row.hidden_dim = cfg.hidden_dim;
            row.learning_rate = cfg.train.learning_rate;
            row.batch_size = cfg.train.batch_size;
            row.epochs = fit.training.history.size();
            row.metrics = score("RNN(" + row.lag_set + ") " + std::to_string(row.year), points, series, eval.begin);
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

std::string WalkForwardReport::to_table() const {
    std::vector<MetricReport> m;
    for (const auto& r : rows) m.push_back(r.metrics);
    return format_metric_table(m);
}

std::string WalkForwardReport::to_json() const {
    nlohmann::ordered_json j;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json row;
        row["lag_set"] = r.lag_set;
        row["year"] = r.year;
        row["hidden_dim"] = r.hidden_dim;
        row["learning_rate"] = r.learning_rate;
        row["batch_size"] = r.batch_size;
        row["epochs"] = r.epochs;
        row["metrics"] = nlohmann::ordered_json::parse(r.metrics.to_json());
        j["rows"].push_back(row);
    }
    j["grids"] = nlohmann::ordered_json::array();
    for (const auto& g : grids) {
        nlohmann::ordered_json cells = nlohmann::ordered_json::array();
        for (const auto& c : g.cells) {
            nlohmann::ordered_json cell{{"hidden_dim", c.hidden_dim}, {"learning_rate", c.learning_rate},
                                        {"batch_size", c.batch_size}, {"epochs", c.epochs},
                                        {"best_epoch", c.best_epoch}, {"seconds", c.seconds}};
            if (c.error.empty()) {
                cell["val_loss"] = c.val_loss;
            } else {
                cell["error"] = c.error;
            }
            cells.push_back(cell);
        }
        j["grids"].push_back(cells);
    }
    return j.dump(2);
}

}  // namespace rnnp
