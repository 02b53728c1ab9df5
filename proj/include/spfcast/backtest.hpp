#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spfcast/data.hpp"
#include "spfcast/estimation.hpp"
#include "spfcast/forecasters.hpp"
#include "spfcast/scoring.hpp"

namespace spfcast {

/// Rolling-origin evaluation settings. Defaults reproduce the standard
/// comparison: origins 1995Q3..2010Q1, all five horizons, every method,
/// 20-quarter no-change windows, 40-quarter training windows, outcomes read
/// from the 2010Q2 vintage.
struct BacktestConfig {
    Quarter test_start{1995, 3};
    Quarter test_end{2010, 1};
    std::vector<int> horizons{1, 2, 3, 4, 5};
    std::vector<Method> methods = all_methods();
    int pnc_window_length = 20;
    int training_window = 40;
    int tnc_mse_window = 20;
    /// A method abstains rather than score from an error window or training
    /// set shorter than this.
    int min_window = 8;
    int min_training_rows = 10;
    Quarter evaluation_vintage{2010, 2};
    std::vector<std::pair<Quarter, Quarter>> sub_periods;
    Method baseline_method = Method::Spf;
    MseScale spf_mse_scale = MseScale::Rmse;
    /// Individual-forecaster evaluation window; when unset the block is skipped.
    std::optional<std::pair<Quarter, Quarter>> forecaster_period;
    std::vector<std::string> forecaster_ids;  // empty: auto-select complete records

    /// Throws Config on violated invariants (start <= end, windows >= 8,
    /// sub-periods inside the span, valid horizons).
    void validate() const;
};

/// Plain-text key=value config file ('#' comments). Unknown keys are
/// rejected so typos fail loudly.
BacktestConfig parse_config(const std::string& text);
BacktestConfig read_config_file(const std::string& path);
std::string config_to_string(const BacktestConfig& config);

/// One scored (method, horizon, origin) cell.
struct LossRecord {
    Method method;
    int horizon;
    Quarter origin;
    double abs_error;
    double crps;
};

/// A skipped cell, with the reason; abstentions are first-class output,
/// never silent.
struct AbstentionRecord {
    Method method;
    int horizon;
    Quarter origin;
    std::string reason;
};

/// Aggregate row for one (method, horizon).
struct ScoreCell {
    Method method;
    int horizon;
    double mae = 0.0;
    double mean_crps = 0.0;
    int n = 0;            // scored origins
    int abstentions = 0;
    DmResult dm_mae;      // vs. baseline on absolute-error losses
    DmResult dm_crps;     // vs. baseline on CRPS losses
    int dm_aligned = 0;   // origins in the pairwise comparison
};

struct ScoreTable {
    Quarter start, end;
    Method baseline;
    std::vector<ScoreCell> cells;  // methods x horizons, config order

    const ScoreCell* find(Method m, int horizon) const;
};

struct BacktestResult {
    ScoreTable table;
    std::vector<LossRecord> losses;
    std::vector<AbstentionRecord> abstentions;
    std::vector<ScoreTable> sub_tables;
};

/// Runs the rolling-origin evaluation. For every origin in the test span,
/// horizon, and method: construct (and fit, for the postprocessors) from the
/// information set of the origin's issue time only, predict origin+h-1,
/// score the point by absolute error and the distribution by its CRPS
/// closed form against the evaluation vintage's realized rate.
BacktestResult run_backtest(const BacktestConfig& config, const VintageStore& store,
                            const SurveyPanel& panel);

/// Re-aggregates retained losses inside [start, end] and recomputes the
/// Diebold-Mariano cells. Throws EmptyPeriod when nothing scored.
ScoreTable stratify(const std::vector<LossRecord>& losses, const BacktestConfig& config,
                    Quarter start, Quarter end,
                    const std::vector<AbstentionRecord>& abstentions = {});

/// Mean losses per (length, method, horizon) when the rolling windows are
/// swept: the no-change window length for the probabilistic no-change
/// method, the training window for the postprocessors. Methods a length
/// cannot serve are recorded as abstentions for that length.
struct SweepCell {
    int length;
    Method method;
    int horizon;
    std::optional<double> mae;
    std::optional<double> mean_crps;
    int n = 0;
    int abstentions = 0;
};
std::vector<SweepCell> training_length_sweep(const BacktestConfig& config,
                                             const std::vector<int>& lengths,
                                             const VintageStore& store,
                                             const SurveyPanel& panel);

/// Per-forecaster point evaluation over a sub-period restricted to panel
/// members with complete records there (every in-scope (origin, horizon)
/// present). MAE and a Diebold-Mariano cell against the survey median.
struct ForecasterCell {
    std::string forecaster_id;
    int horizon;
    double mae;
    DmResult dm;
    int n;
};
struct ForecasterEval {
    Quarter start, end;
    std::vector<std::string> selected_ids;
    std::vector<ForecasterCell> cells;
    std::string note;  // set when no forecaster qualifies
};
ForecasterEval per_forecaster_eval(const SurveyPanel& panel, const BacktestConfig& config,
                                   const VintageStore& store,
                                   const std::vector<std::string>& ids = {});

/// --- Run directory I/O -------------------------------------------------

/// Writes scores.csv, losses.csv, per-sub-period score files,
/// forecasters.csv (when evaluated) and metadata.json into `out_dir`.
/// Deterministic: identical inputs produce byte-identical files.
void write_run_outputs(const std::string& out_dir, const BacktestConfig& config,
                       const BacktestResult& result,
                       const std::optional<ForecasterEval>& forecasters,
                       const std::string& cpi_hash, const std::string& spf_hash);

void write_sweep_csv(const std::string& path, const std::vector<SweepCell>& cells);

/// Renders the tables in a run directory. "md" gives the two-decimal
/// (half-even) tables with Diebold-Mariano cells attached as _xx suffixes;
/// "csv" gives the same rounded tables in CSV form. Codes are recomputed
/// from losses.csv, so the absolute-error and CRPS tables each carry the
/// test run on their own loss.
std::string render_report(const std::string& run_dir, const std::string& format);

}  // namespace spfcast
