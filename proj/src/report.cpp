#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spfcast/backtest.hpp"
#include "spfcast/csv.hpp"
#include "spfcast/numeric.hpp"

namespace spfcast {

namespace {

std::string two_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", round2_half_even(v));
    return buf;
}

std::string scores_csv(const ScoreTable& table) {
    std::ostringstream out;
    out << "method,horizon,mae,crps,dm_code,n,abstentions\n";
    for (const auto& cell : table.cells) {
        out << method_id(cell.method) << ',' << cell.horizon << ','
            << (cell.n > 0 ? format_double(cell.mae) : "") << ','
            << (cell.n > 0 ? format_double(cell.mean_crps) : "") << ','
            << (cell.method == table.baseline ? "" : cell.dm_crps.code) << ',' << cell.n << ','
            << cell.abstentions << '\n';
    }
    return out.str();
}

std::string losses_csv(const std::vector<LossRecord>& losses) {
    std::vector<const LossRecord*> sorted;
    sorted.reserve(losses.size());
    for (const auto& rec : losses) sorted.push_back(&rec);
    std::sort(sorted.begin(), sorted.end(), [](const LossRecord* a, const LossRecord* b) {
        auto ka = std::tuple(static_cast<int>(a->method), a->horizon, a->origin.index());
        auto kb = std::tuple(static_cast<int>(b->method), b->horizon, b->origin.index());
        return ka < kb;
    });
    std::ostringstream out;
    out << "method,horizon,origin,ae,crps\n";
    for (const auto* rec : sorted) {
        out << method_id(rec->method) << ',' << rec->horizon << ',' << rec->origin.str() << ','
            << format_double(rec->abs_error) << ',' << format_double(rec->crps) << '\n';
    }
    return out.str();
}

std::string forecasters_csv(const ForecasterEval& eval) {
    std::ostringstream out;
    out << "forecaster_id,horizon,mae,dm_code,n\n";
    for (const auto& cell : eval.cells) {
        out << cell.forecaster_id << ',' << cell.horizon << ',' << format_double(cell.mae)
            << ',' << cell.dm.code << ',' << cell.n << '\n';
    }
    return out.str();
}

nlohmann::json config_json(const BacktestConfig& config) {
    nlohmann::json j;
    j["test_start"] = config.test_start.str();
    j["test_end"] = config.test_end.str();
    j["evaluation_vintage"] = config.evaluation_vintage.str();
    j["pnc_window_length"] = config.pnc_window_length;
    j["training_window"] = config.training_window;
    j["tnc_mse_window"] = config.tnc_mse_window;
    j["min_window"] = config.min_window;
    j["min_training_rows"] = config.min_training_rows;
    j["horizons"] = config.horizons;
    std::vector<std::string> methods;
    for (Method m : config.methods) methods.emplace_back(method_id(m));
    j["methods"] = methods;
    j["baseline_method"] = method_id(config.baseline_method);
    j["spf_mse_scale"] = config.spf_mse_scale == MseScale::Rmse ? "rmse" : "mse";
    auto periods = nlohmann::json::array();
    for (const auto& [s, e] : config.sub_periods) {
        periods.push_back(s.str() + "-" + e.str());
    }
    j["sub_periods"] = periods;
    if (config.forecaster_period) {
        j["forecaster_period"] =
            config.forecaster_period->first.str() + "-" + config.forecaster_period->second.str();
    }
    j["forecaster_ids"] = config.forecaster_ids;
    return j;
}

}  // namespace

void write_run_outputs(const std::string& out_dir, const BacktestConfig& config,
                       const BacktestResult& result,
                       const std::optional<ForecasterEval>& forecasters,
                       const std::string& cpi_hash, const std::string& spf_hash) {
    std::filesystem::create_directories(out_dir);
    write_file(out_dir + "/scores.csv", scores_csv(result.table));
    write_file(out_dir + "/losses.csv", losses_csv(result.losses));
    for (const auto& sub : result.sub_tables) {
        write_file(out_dir + "/scores_" + sub.start.str() + "_" + sub.end.str() + ".csv",
                   scores_csv(sub));
    }
    if (forecasters) {
        write_file(out_dir + "/forecasters.csv", forecasters_csv(*forecasters));
    }

    nlohmann::json meta;
    meta["config"] = config_json(config);
    meta["data"] = {{"cpi_hash", cpi_hash}, {"spf_hash", spf_hash}};
    meta["conventions"] = {
        {"dm_reference", "normal"},
        {"dm_long_run_variance", "rectangular autocovariances to lag h-1, 1/T normalized"},
        {"dm_degenerate_variance", "code NA, null rejected by convention"},
        {"scores_csv_dm_loss", "crps"},
        {"panel_variance_denominator", "n-1"},
        {"spf_mse_scale", config.spf_mse_scale == MseScale::Rmse ? "rmse" : "mse"},
        {"training_outcomes", "issue-time vintage"},
        {"tnc_mse_window", "h-step no-change backcast within the issue vintage"},
        {"table_rounding", "2 decimals, half-even"},
    };
    auto abst = nlohmann::json::array();
    for (const auto& a : result.abstentions) {
        abst.push_back({{"method", method_id(a.method)},
                        {"horizon", a.horizon},
                        {"origin", a.origin.str()},
                        {"reason", a.reason}});
    }
    meta["abstentions"] = abst;
    auto aligned = nlohmann::json::array();
    for (const auto& cell : result.table.cells) {
        if (cell.method == result.table.baseline) continue;
        aligned.push_back({{"method", method_id(cell.method)},
                           {"horizon", cell.horizon},
                           {"aligned_origins", cell.dm_aligned}});
    }
    meta["dm_alignment"] = aligned;
    if (forecasters && !forecasters->note.empty()) meta["forecaster_note"] = forecasters->note;
    write_file(out_dir + "/metadata.json", meta.dump(2) + "\n");
}

void write_sweep_csv(const std::string& path, const std::vector<SweepCell>& cells) {
    std::ostringstream out;
    out << "length,method,horizon,mae,crps,n,abstentions\n";
    for (const auto& cell : cells) {
        out << cell.length << ',' << method_id(cell.method) << ',' << cell.horizon << ','
            << (cell.mae ? format_double(*cell.mae) : "") << ','
            << (cell.mean_crps ? format_double(*cell.mean_crps) : "") << ',' << cell.n << ','
            << cell.abstentions << '\n';
    }
    write_file(path, out.str());
}

namespace {

struct RunData {
    BacktestConfig config;
    std::vector<LossRecord> losses;
    std::map<std::pair<int, int>, int> abstention_counts;  // (method, horizon)
    std::vector<std::pair<Quarter, Quarter>> sub_periods;
    bool has_forecasters = false;
    CsvTable forecasters;
};

RunData load_run(const std::string& run_dir) {
    RunData run;
    std::string meta_text = read_file(run_dir + "/metadata.json");
    nlohmann::json meta = nlohmann::json::parse(meta_text);
    const auto& cj = meta.at("config");
    run.config.test_start = Quarter::parse(cj.at("test_start").get<std::string>());
    run.config.test_end = Quarter::parse(cj.at("test_end").get<std::string>());
    run.config.evaluation_vintage =
        Quarter::parse(cj.at("evaluation_vintage").get<std::string>());
    run.config.horizons = cj.at("horizons").get<std::vector<int>>();
    run.config.methods.clear();
    for (const auto& id : cj.at("methods")) {
        auto m = method_from_id(id.get<std::string>());
        if (!m) raise(ErrorCode::Parse, "metadata lists unknown method");
        run.config.methods.push_back(*m);
    }
    auto base = method_from_id(cj.at("baseline_method").get<std::string>());
    if (!base) raise(ErrorCode::Parse, "metadata lists unknown baseline");
    run.config.baseline_method = *base;
    for (const auto& p : cj.at("sub_periods")) {
        auto text = p.get<std::string>();
        auto dash = text.find('-');
        run.sub_periods.emplace_back(Quarter::parse(text.substr(0, dash)),
                                     Quarter::parse(text.substr(dash + 1)));
    }

    CsvTable losses = read_csv(run_dir + "/losses.csv");
    int cm = losses.column("method"), ch = losses.column("horizon");
    int co = losses.column("origin"), ca = losses.column("ae"), cc = losses.column("crps");
    if (cm < 0 || ch < 0 || co < 0 || ca < 0 || cc < 0) {
        raise(ErrorCode::Parse, "losses.csv is missing required columns");
    }
    auto to_double = [](const std::string& s) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            raise(ErrorCode::Parse, "bad number '" + s + "' in losses.csv");
        }
        return v;
    };
    for (const auto& row : losses.rows) {
        auto m = method_from_id(row[cm]);
        if (!m) raise(ErrorCode::Parse, "losses.csv lists unknown method '" + row[cm] + "'");
        run.losses.push_back({*m, std::stoi(row[ch]), Quarter::parse(row[co]),
                              to_double(row[ca]), to_double(row[cc])});
    }

    for (const auto& a : meta.at("abstentions")) {
        auto m = method_from_id(a.at("method").get<std::string>());
        if (!m) continue;
        run.abstention_counts[{static_cast<int>(*m), a.at("horizon").get<int>()}]++;
    }

    std::string fpath = run_dir + "/forecasters.csv";
    if (std::filesystem::exists(fpath)) {
        run.has_forecasters = true;
        run.forecasters = read_csv(fpath);
    }
    return run;
}

struct RenderedTables {
    // One row of (value, code) cells per method, columns ordered by horizon.
    std::vector<int> horizons;
    std::vector<Method> methods;
    Method baseline;
    std::map<std::pair<int, int>, std::string> mae_cells;   // (method, horizon) -> "1.45_99"
    std::map<std::pair<int, int>, std::string> crps_cells;
};

std::string cell_text(double value, const DmResult& dm, bool is_baseline) {
    std::string text = two_decimals(value);
    if (!is_baseline) text += "_" + dm.code;
    return text;
}

RenderedTables build_tables(const RunData& run, Quarter start, Quarter end) {
    ScoreTable table = stratify(run.losses, run.config, start, end);
    RenderedTables out;
    out.horizons = run.config.horizons;
    out.methods = run.config.methods;
    out.baseline = run.config.baseline_method;
    for (const auto& cell : table.cells) {
        if (cell.n == 0) continue;
        bool is_base = cell.method == out.baseline;
        auto key = std::pair(static_cast<int>(cell.method), cell.horizon);
        out.mae_cells[key] = cell_text(cell.mae, cell.dm_mae, is_base);
        out.crps_cells[key] = cell_text(cell.mean_crps, cell.dm_crps, is_base);
    }
    return out;
}

void render_md_table(std::ostringstream& out, const std::string& title,
                     const RenderedTables& t, bool crps) {
    out << "### " << title << "\n\n";
    out << "| Forecast method |";
    for (int h : t.horizons) out << " " << h << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < t.horizons.size(); ++i) out << "---|";
    out << "\n";
    for (Method m : t.methods) {
        out << "| " << method_display_name(m) << " |";
        for (int h : t.horizons) {
            auto key = std::pair(static_cast<int>(m), h);
            const auto& cells = crps ? t.crps_cells : t.mae_cells;
            auto it = cells.find(key);
            out << " " << (it == cells.end() ? "-" : it->second) << " |";
        }
        out << "\n";
    }
    out << "\n";
}

void render_csv_table(std::ostringstream& out, const std::string& name,
                      const RenderedTables& t, bool crps) {
    for (Method m : t.methods) {
        for (int h : t.horizons) {
            auto key = std::pair(static_cast<int>(m), h);
            const auto& cells = crps ? t.crps_cells : t.mae_cells;
            auto it = cells.find(key);
            if (it == cells.end()) continue;
            std::string value = it->second;
            std::string code;
            auto sep = value.find('_');
            if (sep != std::string::npos) {
                code = value.substr(sep + 1);
                value = value.substr(0, sep);
            }
            out << name << ',' << method_id(m) << ',' << h << ',' << value << ',' << code
                << '\n';
        }
    }
}

}  // namespace

std::string render_report(const std::string& run_dir, const std::string& format) {
    if (format != "md" && format != "csv") {
        raise(ErrorCode::InvalidArgument, "report format must be 'md' or 'csv'");
    }
    RunData run = load_run(run_dir);
    std::ostringstream out;

    std::vector<std::pair<Quarter, Quarter>> spans{{run.config.test_start, run.config.test_end}};
    spans.insert(spans.end(), run.sub_periods.begin(), run.sub_periods.end());

    if (format == "md") {
        out << "# Forecast evaluation report\n\n";
        out << "Test span " << run.config.test_start.str() << ".." << run.config.test_end.str()
            << "; Diebold-Mariano cells are lower tail probabilities vs. "
            << method_display_name(run.config.baseline_method)
            << ", encoded 00..99 (NA: non-positive variance estimate).\n\n";
        for (const auto& [s, e] : spans) {
            RenderedTables t = build_tables(run, s, e);
            std::string span = s.str() + " - " + e.str();
            render_md_table(out, "Mean absolute error (MAE), " + span, t, false);
            render_md_table(out, "Mean CRPS, " + span, t, true);
        }
        if (run.has_forecasters && !run.forecasters.rows.empty()) {
            out << "### Individual forecasters (MAE)\n\n";
            out << "| Forecaster | Horizon | MAE | DM | n |\n|---|---|---|---|---|\n";
            for (const auto& row : run.forecasters.rows) {
                out << "| " << row[0] << " | " << row[1] << " | "
                    << two_decimals(std::stod(row[2])) << " | " << row[3] << " | " << row[4]
                    << " |\n";
            }
            out << "\n";
        }
    } else {
        out << "table,method,horizon,value,dm_code\n";
        for (const auto& [s, e] : spans) {
            RenderedTables t = build_tables(run, s, e);
            std::string span = s.str() + "_" + e.str();
            render_csv_table(out, "mae_" + span, t, false);
            render_csv_table(out, "crps_" + span, t, true);
        }
    }
    return out.str();
}

}  // namespace spfcast
