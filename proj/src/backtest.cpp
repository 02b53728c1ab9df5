#include "spfcast/backtest.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spfcast/csv.hpp"
#include "spfcast/numeric.hpp"

namespace spfcast {

void BacktestConfig::validate() const {
    if (test_start > test_end) raise(ErrorCode::Config, "test_start must not exceed test_end");
    if (horizons.empty()) raise(ErrorCode::Config, "at least one horizon is required");
    for (int h : horizons) {
        if (h < 1 || h > 5) raise(ErrorCode::Config, "horizons must lie in 1..5");
    }
    if (methods.empty()) raise(ErrorCode::Config, "at least one method is required");
    if (pnc_window_length < 8 || training_window < 8 || tnc_mse_window < 8) {
        raise(ErrorCode::Config, "windows must be >= 8 quarters");
    }
    if (min_window < 1 || min_training_rows < 1) {
        raise(ErrorCode::Config, "minimum window sizes must be positive");
    }
    for (const auto& [s, e] : sub_periods) {
        if (s > e || s < test_start || e > test_end) {
            raise(ErrorCode::Config, "sub-period " + s.str() + ".." + e.str() +
                                         " must lie inside the test span");
        }
    }
    if (forecaster_period) {
        if (forecaster_period->first > forecaster_period->second) {
            raise(ErrorCode::Config, "forecaster evaluation period is inverted");
        }
    }
    if (std::find(methods.begin(), methods.end(), baseline_method) == methods.end()) {
        raise(ErrorCode::Config, "baseline method must be among the evaluated methods");
    }
}

namespace {

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t pos = text.find(sep, start);
        std::string item = pos == std::string::npos ? text.substr(start)
                                                    : text.substr(start, pos - start);
        std::size_t b = item.find_first_not_of(" \t");
        std::size_t e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

int to_int(const std::string& s, const std::string& key) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        raise(ErrorCode::Config, "key '" + key + "': bad integer '" + s + "'");
    }
    return v;
}

}  // namespace

BacktestConfig parse_config(const std::string& text) {
    BacktestConfig config;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            raise(ErrorCode::Config,
                  "line " + std::to_string(line_no) + ": expected key = value");
        }
        auto strip = [](std::string s) {
            std::size_t x = s.find_first_not_of(" \t\r");
            if (x == std::string::npos) return std::string();
            std::size_t y = s.find_last_not_of(" \t\r");
            return s.substr(x, y - x + 1);
        };
        std::string key = strip(line.substr(0, eq));
        std::string value = strip(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            raise(ErrorCode::Config, "line " + std::to_string(line_no) + ": empty key or value");
        }

        if (key == "test_start") {
            config.test_start = Quarter::parse(value);
        } else if (key == "test_end") {
            config.test_end = Quarter::parse(value);
        } else if (key == "evaluation_vintage") {
            config.evaluation_vintage = Quarter::parse(value);
        } else if (key == "pnc_window_length") {
            config.pnc_window_length = to_int(value, key);
        } else if (key == "training_window") {
            config.training_window = to_int(value, key);
        } else if (key == "tnc_mse_window") {
            config.tnc_mse_window = to_int(value, key);
        } else if (key == "min_window") {
            config.min_window = to_int(value, key);
        } else if (key == "min_training_rows") {
            config.min_training_rows = to_int(value, key);
        } else if (key == "horizons") {
            config.horizons.clear();
            for (const auto& item : split_list(value, ',')) {
                config.horizons.push_back(to_int(item, key));
            }
        } else if (key == "methods") {
            config.methods.clear();
            for (const auto& item : split_list(value, ',')) {
                auto m = method_from_id(item);
                if (!m) raise(ErrorCode::Config, "unknown method '" + item + "'");
                config.methods.push_back(*m);
            }
        } else if (key == "baseline_method") {
            auto m = method_from_id(value);
            if (!m) raise(ErrorCode::Config, "unknown method '" + value + "'");
            config.baseline_method = *m;
        } else if (key == "spf_mse_scale") {
            if (value == "rmse") {
                config.spf_mse_scale = MseScale::Rmse;
            } else if (value == "mse") {
                config.spf_mse_scale = MseScale::Mse;
            } else {
                raise(ErrorCode::Config, "spf_mse_scale must be rmse or mse");
            }
        } else if (key == "sub_periods") {
            config.sub_periods.clear();
            for (const auto& item : split_list(value, ';')) {
                auto parts = split_list(item, '-');
                if (parts.size() != 2) {
                    raise(ErrorCode::Config, "sub-period '" + item + "' must be START-END");
                }
                config.sub_periods.emplace_back(Quarter::parse(parts[0]),
                                                Quarter::parse(parts[1]));
            }
        } else if (key == "forecaster_period") {
            auto parts = split_list(value, '-');
            if (parts.size() != 2) {
                raise(ErrorCode::Config, "forecaster_period must be START-END");
            }
            config.forecaster_period = {Quarter::parse(parts[0]), Quarter::parse(parts[1])};
        } else if (key == "forecaster_ids") {
            config.forecaster_ids = split_list(value, ',');
        } else {
            raise(ErrorCode::Config, "unknown config key '" + key + "'");
        }
    }
    config.validate();
    return config;
}

BacktestConfig read_config_file(const std::string& path) {
    return parse_config(read_file(path));
}

std::string config_to_string(const BacktestConfig& config) {
    std::ostringstream out;
    out << "test_start = " << config.test_start.str() << '\n';
    out << "test_end = " << config.test_end.str() << '\n';
    out << "evaluation_vintage = " << config.evaluation_vintage.str() << '\n';
    out << "pnc_window_length = " << config.pnc_window_length << '\n';
    out << "training_window = " << config.training_window << '\n';
    out << "tnc_mse_window = " << config.tnc_mse_window << '\n';
    out << "min_window = " << config.min_window << '\n';
    out << "min_training_rows = " << config.min_training_rows << '\n';
    out << "horizons = ";
    for (std::size_t i = 0; i < config.horizons.size(); ++i) {
        out << (i ? "," : "") << config.horizons[i];
    }
    out << '\n' << "methods = ";
    for (std::size_t i = 0; i < config.methods.size(); ++i) {
        out << (i ? "," : "") << method_id(config.methods[i]);
    }
    out << '\n' << "baseline_method = " << method_id(config.baseline_method) << '\n';
    out << "spf_mse_scale = " << (config.spf_mse_scale == MseScale::Rmse ? "rmse" : "mse")
        << '\n';
    if (!config.sub_periods.empty()) {
        out << "sub_periods = ";
        for (std::size_t i = 0; i < config.sub_periods.size(); ++i) {
            out << (i ? ";" : "") << config.sub_periods[i].first.str() << '-'
                << config.sub_periods[i].second.str();
        }
        out << '\n';
    }
    if (config.forecaster_period) {
        out << "forecaster_period = " << config.forecaster_period->first.str() << '-'
            << config.forecaster_period->second.str() << '\n';
    }
    if (!config.forecaster_ids.empty()) {
        out << "forecaster_ids = ";
        for (std::size_t i = 0; i < config.forecaster_ids.size(); ++i) {
            out << (i ? "," : "") << config.forecaster_ids[i];
        }
        out << '\n';
    }
    return out.str();
}

const ScoreCell* ScoreTable::find(Method m, int horizon) const {
    for (const auto& cell : cells) {
        if (cell.method == m && cell.horizon == horizon) return &cell;
    }
    return nullptr;
}

namespace {

/// Shared per-(origin, horizon) context assembled once and reused by every
/// method evaluated at that cell.
struct CellInputs {
    Quarter origin;
    int horizon;
    std::optional<double> realized;          // from the evaluation vintage
    std::optional<CovariateRow> current_row; // from the issue information set
    bool training_built = false;
    std::optional<TrainingSet> training;     // shared by the postprocessors
};

class Engine {
public:
    Engine(const BacktestConfig& config, const VintageStore& store, const SurveyPanel& panel)
        : config_(config), store_(store), panel_(panel) {}

    BacktestResult run() {
        BacktestResult result;
        for (Quarter origin = config_.test_start; origin <= config_.test_end;
             origin = origin + 1) {
            for (int horizon : config_.horizons) {
                evaluate_cell(origin, horizon, result);
            }
        }
        result.table = stratify(result.losses, config_, config_.test_start, config_.test_end,
                                result.abstentions);
        for (const auto& [s, e] : config_.sub_periods) {
            result.sub_tables.push_back(stratify(result.losses, config_, s, e,
                                                 result.abstentions));
        }
        return result;
    }

private:
    void evaluate_cell(Quarter origin, int horizon, BacktestResult& result) {
        CellInputs cell;
        cell.origin = origin;
        cell.horizon = horizon;
        Quarter target = origin + (horizon - 1);
        try {
            cell.realized = store_.realized(target, config_.evaluation_vintage);
        } catch (const Error& e) {
            // No outcome to score against: every method abstains here.
            for (Method m : config_.methods) {
                result.abstentions.push_back({m, horizon, origin, error_code_name(e.code())});
            }
            return;
        }
        for (Method m : config_.methods) {
            try {
                Forecast f = make_forecast(m, cell);
                double y = *cell.realized;
                result.losses.push_back(
                    {m, horizon, origin, std::abs(f.point - y), crps(f.dist, y)});
            } catch (const Error& e) {
                result.abstentions.push_back({m, horizon, origin, error_code_name(e.code())});
            }
        }
    }

    const CovariateRow& current_row(CellInputs& cell) {
        if (!cell.current_row) {
            cell.current_row = covariate_row(cell.origin, cell.horizon, cell.origin, store_,
                                             panel_, config_.pnc_window_length);
            if (!cell.current_row) {
                raise(ErrorCode::InsufficientData,
                      "covariates unavailable at " + cell.origin.str());
            }
        }
        return *cell.current_row;
    }

    const TrainingSet& training_set(CellInputs& cell) {
        if (!cell.training_built) {
            cell.training_built = true;
            std::vector<CovariateRow> rows;
            // The training window covers the most recent origins whose
            // targets are realized strictly before the issue quarter.
            Quarter newest = cell.origin - cell.horizon;
            for (int k = 0; k < config_.training_window; ++k) {
                Quarter o = newest - k;
                auto row = covariate_row(o, cell.horizon, cell.origin, store_, panel_,
                                         config_.pnc_window_length);
                if (row && row->realized) rows.push_back(*row);
            }
            if (static_cast<int>(rows.size()) >= config_.min_training_rows) {
                cell.training = TrainingSet::build(std::move(rows), cell.horizon,
                                                   config_.training_window);
            }
        }
        if (!cell.training) {
            raise(ErrorCode::InsufficientTraining,
                  "fewer than " + std::to_string(config_.min_training_rows) +
                      " training rows at " + cell.origin.str() + " horizon " +
                      std::to_string(cell.horizon));
        }
        return *cell.training;
    }

    Forecast make_forecast(Method m, CellInputs& cell) {
        const Quarter origin = cell.origin;
        const int h = cell.horizon;
        switch (m) {
            case Method::Spf:
                return spf_ensemble(origin, h, panel_);
            case Method::Pnc:
                return probabilistic_no_change(origin, config_.pnc_window_length, store_);
            case Method::Tnc: {
                MseState mse = tnc_mse_window(origin, h, config_.tnc_mse_window,
                                              config_.min_window, store_);
                return traditional_no_change(origin, h, store_, mse);
            }
            case Method::SpfMse: {
                MseState mse = spf_mse_window(origin, h, config_.training_window,
                                              config_.min_window, store_, panel_);
                return spf_median_mse(origin, h, panel_, mse, config_.spf_mse_scale);
            }
            case Method::Hr1:
            case Method::Hr2: {
                const TrainingSet& train = training_set(cell);
                HrVariant variant = m == Method::Hr1 ? HrVariant::SpfOnly : HrVariant::SpfPnc;
                FitReport fit = fit_hr(train, variant, fit_seed(origin, h));
                TwoPieceNormal dist = hr_predict(fit.hr(), current_row(cell));
                double point = dist.quantile(0.5);
                return {dist, point};
            }
            case Method::Gm1:
            case Method::Gm2: {
                const TrainingSet& train = training_set(cell);
                GmVariant variant =
                    m == Method::Gm1 ? GmVariant::Standard : GmVariant::VarianceAdjusted;
                FitReport fit = fit_gm_em(train, variant);
                GaussianMixture2 dist = gm_predict(fit.gm(), current_row(cell));
                double point = dist.quantile(0.5);
                return {dist, point};
            }
        }
        raise(ErrorCode::InvalidArgument, "unknown method");
    }

    static std::uint64_t fit_seed(Quarter origin, int horizon) {
        return mix_seed(static_cast<std::uint64_t>(origin.index()),
                        static_cast<std::uint64_t>(horizon));
    }

    const BacktestConfig& config_;
    const VintageStore& store_;
    const SurveyPanel& panel_;
};

}  // namespace

BacktestResult run_backtest(const BacktestConfig& config, const VintageStore& store,
                            const SurveyPanel& panel) {
    config.validate();
    if (!store.frozen() || !panel.frozen()) {
        raise(ErrorCode::InvalidArgument, "stores must be frozen before a backtest");
    }
    store.rates(config.evaluation_vintage);  // fail fast on a bad evaluation vintage
    return Engine(config, store, panel).run();
}

namespace {

DmResult dm_against_baseline(const std::vector<const LossRecord*>& method_losses,
                             const std::vector<const LossRecord*>& baseline_losses,
                             int horizon, bool use_crps, int& aligned) {
    std::map<int, double> base;
    for (const auto* rec : baseline_losses) {
        base[rec->origin.index()] = use_crps ? rec->crps : rec->abs_error;
    }
    ScoreSeries a, b;
    a.horizon = b.horizon = horizon;
    for (const auto* rec : method_losses) {
        auto it = base.find(rec->origin.index());
        if (it == base.end()) continue;
        a.origin_quarters.push_back(rec->origin);
        a.values.push_back(use_crps ? rec->crps : rec->abs_error);
        b.origin_quarters.push_back(rec->origin);
        b.values.push_back(it->second);
    }
    aligned = static_cast<int>(a.values.size());
    if (aligned < 2) return DmResult{};  // too few aligned origins to test
    return dm_test(a, b);
}

}  // namespace

ScoreTable stratify(const std::vector<LossRecord>& losses, const BacktestConfig& config,
                    Quarter start, Quarter end,
                    const std::vector<AbstentionRecord>& abstentions) {
    if (start > end) raise(ErrorCode::Config, "stratification period is inverted");

    // Bucket in-period losses per (method, horizon).
    std::map<std::pair<int, int>, std::vector<const LossRecord*>> buckets;
    for (const auto& rec : losses) {
        if (rec.origin < start || rec.origin > end) continue;
        buckets[{static_cast<int>(rec.method), rec.horizon}].push_back(&rec);
    }
    bool any = false;
    for (const auto& [_, v] : buckets) any = any || !v.empty();
    if (!any) {
        raise(ErrorCode::EmptyPeriod,
              "no scored origins in " + start.str() + ".." + end.str());
    }

    ScoreTable table;
    table.start = start;
    table.end = end;
    table.baseline = config.baseline_method;
    for (Method m : config.methods) {
        for (int h : config.horizons) {
            ScoreCell cell;
            cell.method = m;
            cell.horizon = h;
            const auto& recs = buckets[{static_cast<int>(m), h}];
            cell.n = static_cast<int>(recs.size());
            if (cell.n > 0) {
                double ae = 0.0, cr = 0.0;
                for (const auto* r : recs) {
                    ae += r->abs_error;
                    cr += r->crps;
                }
                cell.mae = ae / cell.n;
                cell.mean_crps = cr / cell.n;
            }
            for (const auto& ab : abstentions) {
                if (ab.method == m && ab.horizon == h && ab.origin >= start &&
                    ab.origin <= end) {
                    ++cell.abstentions;
                }
            }
            if (m != config.baseline_method && cell.n > 0) {
                const auto& base = buckets[{static_cast<int>(config.baseline_method), h}];
                cell.dm_mae = dm_against_baseline(recs, base, h, false, cell.dm_aligned);
                cell.dm_crps = dm_against_baseline(recs, base, h, true, cell.dm_aligned);
            }
            table.cells.push_back(std::move(cell));
        }
    }
    return table;
}

std::vector<SweepCell> training_length_sweep(const BacktestConfig& config,
                                             const std::vector<int>& lengths,
                                             const VintageStore& store,
                                             const SurveyPanel& panel) {
    config.validate();
    if (lengths.empty()) raise(ErrorCode::Config, "sweep needs at least one length");

    auto is_pnc_swept = [](Method m) { return m == Method::Pnc; };
    auto is_training_swept = [](Method m) {
        return m == Method::SpfMse || m == Method::Hr1 || m == Method::Hr2 ||
               m == Method::Gm1 || m == Method::Gm2;
    };

    // Methods indifferent to both knobs are evaluated once.
    std::vector<Method> fixed_methods, pnc_methods, train_methods;
    for (Method m : config.methods) {
        if (is_pnc_swept(m)) {
            pnc_methods.push_back(m);
        } else if (is_training_swept(m)) {
            train_methods.push_back(m);
        } else {
            fixed_methods.push_back(m);
        }
    }

    auto run_subset = [&](const std::vector<Method>& methods,
                          const BacktestConfig& cfg) -> std::optional<BacktestResult> {
        if (methods.empty()) return std::nullopt;
        BacktestConfig sub = cfg;
        sub.methods = methods;
        sub.sub_periods.clear();
        sub.forecaster_period.reset();
        if (std::find(methods.begin(), methods.end(), sub.baseline_method) == methods.end()) {
            sub.baseline_method = methods.front();
        }
        return run_backtest(sub, store, panel);
    };

    std::optional<BacktestResult> fixed = run_subset(fixed_methods, config);

    std::vector<SweepCell> out;
    auto emit = [&](int length, Method m, int h, const BacktestResult& res) {
        SweepCell cell;
        cell.length = length;
        cell.method = m;
        cell.horizon = h;
        if (const ScoreCell* sc = res.table.find(m, h)) {
            cell.n = sc->n;
            cell.abstentions = sc->abstentions;
            if (sc->n > 0) {
                cell.mae = sc->mae;
                cell.mean_crps = sc->mean_crps;
            }
        }
        out.push_back(cell);
    };

    for (int length : lengths) {
        if (length < 8) raise(ErrorCode::Config, "sweep lengths must be >= 8");
        BacktestConfig pnc_cfg = config;
        pnc_cfg.pnc_window_length = length;
        std::optional<BacktestResult> pnc_res;
        try {
            pnc_res = run_subset(pnc_methods, pnc_cfg);
        } catch (const Error&) {
            pnc_res.reset();  // infeasible length: abstain below
        }
        BacktestConfig train_cfg = config;
        train_cfg.training_window = length;
        std::optional<BacktestResult> train_res;
        try {
            train_res = run_subset(train_methods, train_cfg);
        } catch (const Error&) {
            train_res.reset();
        }

        for (Method m : config.methods) {
            for (int h : config.horizons) {
                const BacktestResult* src = nullptr;
                if (is_pnc_swept(m)) {
                    src = pnc_res ? &*pnc_res : nullptr;
                } else if (is_training_swept(m)) {
                    src = train_res ? &*train_res : nullptr;
                } else {
                    src = fixed ? &*fixed : nullptr;
                }
                if (src) {
                    emit(length, m, h, *src);
                } else {
                    SweepCell cell;
                    cell.length = length;
                    cell.method = m;
                    cell.horizon = h;
                    cell.abstentions = 1;
                    out.push_back(cell);
                }
            }
        }
    }
    return out;
}

ForecasterEval per_forecaster_eval(const SurveyPanel& panel, const BacktestConfig& config,
                                   const VintageStore& store,
                                   const std::vector<std::string>& ids) {
    if (!config.forecaster_period) {
        raise(ErrorCode::Config, "forecaster evaluation requires a sub-period");
    }
    auto [start, end] = *config.forecaster_period;

    ForecasterEval eval;
    eval.start = start;
    eval.end = end;

    std::vector<std::string> candidates = !ids.empty() ? ids
                                          : !config.forecaster_ids.empty()
                                              ? config.forecaster_ids
                                              : panel.forecaster_ids();
    // Complete record: a value at every in-scope (origin, horizon).
    for (const std::string& id : candidates) {
        bool complete = true;
        for (Quarter o = start; o <= end && complete; o = o + 1) {
            for (int h : config.horizons) {
                if (!panel.value_of(o, h, id)) {
                    complete = false;
                    break;
                }
            }
        }
        if (complete) eval.selected_ids.push_back(id);
    }
    if (eval.selected_ids.empty()) {
        eval.note = "no forecaster with a complete record over " + start.str() + ".." +
                    end.str();
        return eval;
    }

    for (const std::string& id : eval.selected_ids) {
        for (int h : config.horizons) {
            ScoreSeries mine, base;
            mine.horizon = base.horizon = h;
            for (Quarter o = start; o <= end; o = o + 1) {
                double y;
                try {
                    y = store.realized(o + (h - 1), config.evaluation_vintage);
                } catch (const Error&) {
                    continue;  // outcome still pending; skip for everyone
                }
                auto v = panel.value_of(o, h, id);
                std::vector<double> members = panel.values(o, h);
                if (!v || members.size() < 2) continue;
                Ensemble ens(std::move(members));
                mine.origin_quarters.push_back(o);
                mine.values.push_back(std::abs(*v - y));
                base.origin_quarters.push_back(o);
                base.values.push_back(std::abs(ens.median() - y));
            }
            if (mine.values.empty()) continue;
            ForecasterCell cell;
            cell.forecaster_id = id;
            cell.horizon = h;
            cell.n = static_cast<int>(mine.values.size());
            cell.mae = aggregate(mine);
            cell.dm = mine.values.size() >= 2 ? dm_test(mine, base) : DmResult{};
            eval.cells.push_back(std::move(cell));
        }
    }
    return eval;
}

}  // namespace spfcast
