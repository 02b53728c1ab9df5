#include "spfcast.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "spfcast/backtest.hpp"
#include "spfcast/csv.hpp"
#include "spfcast/estimation.hpp"
#include "spfcast/ingest.hpp"
#include "spfcast/numeric.hpp"

using namespace spfcast;

namespace {

thread_local std::string g_last_error;

int status_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return SPFCAST_E_INVALID_ARGUMENT;
        case ErrorCode::Domain: return SPFCAST_E_DOMAIN;
        case ErrorCode::Unsupported: return SPFCAST_E_UNSUPPORTED;
        case ErrorCode::MissingVintage: return SPFCAST_E_MISSING_VINTAGE;
        case ErrorCode::NoDataYet: return SPFCAST_E_NO_DATA_YET;
        case ErrorCode::PendingObservation: return SPFCAST_E_PENDING_OBSERVATION;
        case ErrorCode::InsufficientPanel: return SPFCAST_E_INSUFFICIENT_PANEL;
        case ErrorCode::InsufficientHistory: return SPFCAST_E_INSUFFICIENT_HISTORY;
        case ErrorCode::InsufficientData: return SPFCAST_E_INSUFFICIENT_DATA;
        case ErrorCode::InsufficientTraining: return SPFCAST_E_INSUFFICIENT_TRAINING;
        case ErrorCode::FitFailure: return SPFCAST_E_FIT_FAILURE;
        case ErrorCode::Alignment: return SPFCAST_E_ALIGNMENT;
        case ErrorCode::EmptyPeriod: return SPFCAST_E_EMPTY_PERIOD;
        case ErrorCode::Parse: return SPFCAST_E_PARSE;
        case ErrorCode::Config: return SPFCAST_E_CONFIG;
        case ErrorCode::Io: return SPFCAST_E_IO;
    }
    return SPFCAST_E_INTERNAL;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return SPFCAST_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SPFCAST_E_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return SPFCAST_E_INTERNAL;
    }
}

int require(bool condition, const char* message) {
    if (condition) return SPFCAST_OK;
    g_last_error = message;
    return SPFCAST_E_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

BacktestConfig load_config(const char* config_path) {
    return config_path ? read_config_file(config_path) : BacktestConfig{};
}

}  // namespace

struct spfcast_dist {
    PredictiveDistribution value;
};

struct spfcast_store {
    Stores stores;
};

extern "C" {

const char* spfcast_version(void) { return "0.1.0"; }

const char* spfcast_status_name(int status) {
    switch (status) {
        case SPFCAST_OK: return "ok";
        case SPFCAST_E_INVALID_ARGUMENT: return "invalid-argument";
        case SPFCAST_E_DOMAIN: return "domain";
        case SPFCAST_E_UNSUPPORTED: return "unsupported";
        case SPFCAST_E_MISSING_VINTAGE: return "missing-vintage";
        case SPFCAST_E_NO_DATA_YET: return "no-data-yet";
        case SPFCAST_E_PENDING_OBSERVATION: return "pending-observation";
        case SPFCAST_E_INSUFFICIENT_PANEL: return "insufficient-panel";
        case SPFCAST_E_INSUFFICIENT_HISTORY: return "insufficient-history";
        case SPFCAST_E_INSUFFICIENT_DATA: return "insufficient-data";
        case SPFCAST_E_INSUFFICIENT_TRAINING: return "insufficient-training";
        case SPFCAST_E_FIT_FAILURE: return "fit-failure";
        case SPFCAST_E_ALIGNMENT: return "alignment";
        case SPFCAST_E_EMPTY_PERIOD: return "empty-period";
        case SPFCAST_E_PARSE: return "parse";
        case SPFCAST_E_CONFIG: return "config";
        case SPFCAST_E_IO: return "io";
        case SPFCAST_E_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* spfcast_last_error(void) { return g_last_error.c_str(); }

void spfcast_free(char* ptr) { std::free(ptr); }

int spfcast_dist_gaussian(double mu, double sigma, spfcast_dist** out) {
    if (int rc = require(out != nullptr, "out must not be null")) return rc;
    return guarded([&] { *out = new spfcast_dist{Gaussian(mu, sigma)}; });
}

int spfcast_dist_two_piece_normal(double mu, double sigma1, double sigma2,
                                  spfcast_dist** out) {
    if (int rc = require(out != nullptr, "out must not be null")) return rc;
    return guarded([&] { *out = new spfcast_dist{TwoPieceNormal(mu, sigma1, sigma2)}; });
}

int spfcast_dist_mixture(double alpha, double mu1, double sigma1, double mu2, double sigma2,
                         spfcast_dist** out) {
    if (int rc = require(out != nullptr, "out must not be null")) return rc;
    return guarded(
        [&] { *out = new spfcast_dist{GaussianMixture2(alpha, mu1, sigma1, mu2, sigma2)}; });
}

int spfcast_dist_ensemble(const double* members, size_t count, spfcast_dist** out) {
    if (int rc = require(out != nullptr && members != nullptr, "null argument")) return rc;
    return guarded([&] {
        *out = new spfcast_dist{Ensemble(std::vector<double>(members, members + count))};
    });
}

void spfcast_dist_free(spfcast_dist* dist) { delete dist; }

int spfcast_dist_cdf(const spfcast_dist* dist, double y, double* out) {
    if (int rc = require(dist != nullptr && out != nullptr, "null argument")) return rc;
    return guarded([&] { *out = cdf(dist->value, y); });
}

int spfcast_dist_pdf(const spfcast_dist* dist, double y, double* out) {
    if (int rc = require(dist != nullptr && out != nullptr, "null argument")) return rc;
    return guarded([&] { *out = pdf(dist->value, y); });
}

int spfcast_dist_quantile(const spfcast_dist* dist, double p, double* out) {
    if (int rc = require(dist != nullptr && out != nullptr, "null argument")) return rc;
    return guarded([&] { *out = quantile(dist->value, p); });
}

int spfcast_crps(const spfcast_dist* dist, double y, double* out) {
    if (int rc = require(dist != nullptr && out != nullptr, "null argument")) return rc;
    return guarded([&] { *out = crps(dist->value, y); });
}

int spfcast_crps_numeric(const spfcast_dist* dist, double y, double* out) {
    if (int rc = require(dist != nullptr && out != nullptr, "null argument")) return rc;
    return guarded([&] { *out = crps_numeric(dist->value, y); });
}

int spfcast_dm_test(const double* loss_a, const double* loss_b, size_t count, int horizon,
                    double* statistic, double* lower_tail_prob, char code[3],
                    int* reject_by_convention) {
    if (int rc = require(loss_a && loss_b && statistic && lower_tail_prob && code &&
                             reject_by_convention,
                         "null argument")) {
        return rc;
    }
    return guarded([&] {
        ScoreSeries a, b;
        a.horizon = b.horizon = horizon;
        for (size_t i = 0; i < count; ++i) {
            Quarter q = Quarter::from_index(static_cast<int>(i));
            a.origin_quarters.push_back(q);
            b.origin_quarters.push_back(q);
            a.values.push_back(loss_a[i]);
            b.values.push_back(loss_b[i]);
        }
        DmResult r = dm_test(a, b);
        *statistic = r.statistic.value_or(std::nan(""));
        *lower_tail_prob = r.lower_tail_prob.value_or(std::nan(""));
        std::snprintf(code, 3, "%s", r.code.c_str());
        *reject_by_convention = r.reject_by_convention ? 1 : 0;
    });
}

int spfcast_encode_tail_probability(double p, char code[3]) {
    if (int rc = require(code != nullptr, "null argument")) return rc;
    return guarded([&] {
        std::string s = encode_tail_probability(p);
        std::snprintf(code, 3, "%s", s.c_str());
    });
}

int spfcast_store_open_csv(const char* cpi_csv_path, const char* spf_csv_path,
                           spfcast_store** out) {
    if (int rc = require(cpi_csv_path && spf_csv_path && out, "null argument")) return rc;
    return guarded(
        [&] { *out = new spfcast_store{load_stores_csv(cpi_csv_path, spf_csv_path)}; });
}

int spfcast_store_open(const char* store_dir, spfcast_store** out) {
    if (int rc = require(store_dir && out, "null argument")) return rc;
    return guarded([&] { *out = new spfcast_store{load_store_dir(store_dir)}; });
}

void spfcast_store_free(spfcast_store* store) { delete store; }

int spfcast_ingest(const char* cpi_csv_path, const char* spf_csv_path, const char* out_dir) {
    if (int rc = require(cpi_csv_path && spf_csv_path && out_dir, "null argument")) return rc;
    return guarded([&] {
        Stores stores = load_stores_csv(cpi_csv_path, spf_csv_path);
        write_store_dir(out_dir, stores);
    });
}

int spfcast_backtest(const spfcast_store* store, const char* config_path,
                     const char* out_dir) {
    if (int rc = require(store && out_dir, "null argument")) return rc;
    return guarded([&] {
        BacktestConfig config = load_config(config_path);
        BacktestResult result = run_backtest(config, store->stores.cpi, store->stores.spf);
        std::optional<ForecasterEval> forecasters;
        if (config.forecaster_period) {
            forecasters = per_forecaster_eval(store->stores.spf, config, store->stores.cpi);
        }
        write_run_outputs(out_dir, config, result, forecasters, store->stores.cpi_hash,
                          store->stores.spf_hash);
    });
}

int spfcast_sweep(const spfcast_store* store, const char* config_path, const char* lengths,
                  const char* out_dir) {
    if (int rc = require(store && lengths && out_dir, "null argument")) return rc;
    return guarded([&] {
        BacktestConfig config = load_config(config_path);
        std::vector<int> parsed;
        std::string text(lengths);
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t comma = text.find(',', start);
            std::string item = comma == std::string::npos ? text.substr(start)
                                                          : text.substr(start, comma - start);
            if (!item.empty()) parsed.push_back(std::stoi(item));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        auto cells = training_length_sweep(config, parsed, store->stores.cpi,
                                           store->stores.spf);
        std::filesystem::create_directories(out_dir);
        write_sweep_csv(std::string(out_dir) + "/sweep.csv", cells);
    });
}

int spfcast_report(const char* run_dir, const char* format, char** out) {
    if (int rc = require(run_dir && format && out, "null argument")) return rc;
    return guarded([&] {
        std::string text = render_report(run_dir, format);
        *out = dup_string(text);
        if (!*out) raise(ErrorCode::Io, "allocation failed");
    });
}

int spfcast_fit(const spfcast_store* store, const char* config_path, const char* origin,
                int horizon, const char* method, const char* trace_csv_path,
                char** out_json) {
    if (int rc = require(store && origin && method && out_json, "null argument")) return rc;
    return guarded([&] {
        BacktestConfig config = load_config(config_path);
        Quarter o = Quarter::parse(origin);
        auto m = method_from_id(method);
        if (!m || (*m != Method::Hr1 && *m != Method::Hr2 && *m != Method::Gm1 &&
                   *m != Method::Gm2)) {
            raise(ErrorCode::InvalidArgument,
                  std::string("fit supports hr1, hr2, gm1, gm2; got '") + method + "'");
        }
        if (horizon < 1 || horizon > 5) raise(ErrorCode::InvalidArgument, "horizon must be 1..5");

        // Same training-set construction as the backtest engine.
        std::vector<CovariateRow> rows;
        Quarter newest = o - horizon;
        for (int k = 0; k < config.training_window; ++k) {
            auto row = covariate_row(newest - k, horizon, o, store->stores.cpi,
                                     store->stores.spf, config.pnc_window_length);
            if (row && row->realized) rows.push_back(*row);
        }
        if (static_cast<int>(rows.size()) < config.min_training_rows) {
            raise(ErrorCode::InsufficientTraining,
                  "fewer than " + std::to_string(config.min_training_rows) +
                      " training rows at " + o.str());
        }
        TrainingSet train =
            TrainingSet::build(std::move(rows), horizon, config.training_window);

        std::uint64_t seed = mix_seed(static_cast<std::uint64_t>(o.index()),
                                      static_cast<std::uint64_t>(horizon));
        nlohmann::json j;
        j["origin"] = o.str();
        j["horizon"] = horizon;
        j["method"] = method;
        j["training_rows"] = train.rows.size();
        FitReport report;
        if (*m == Method::Hr1 || *m == Method::Hr2) {
            report = fit_hr(train, *m == Method::Hr1 ? HrVariant::SpfOnly : HrVariant::SpfPnc,
                            seed);
            const HrParams& p = report.hr();
            j["params"] = {{"a", p.a},   {"b1", p.b1},   {"b2", p.b2},
                           {"c1", p.c1}, {"d11", p.d11}, {"d12", p.d12},
                           {"c2", p.c2}, {"d21", p.d21}, {"d22", p.d22}};
            j["objective"] = report.trace.back();
        } else {
            report = fit_gm_em(train,
                               *m == Method::Gm1 ? GmVariant::Standard
                                                 : GmVariant::VarianceAdjusted);
            const GmParams& p = report.gm();
            j["params"] = {{"alpha", p.alpha}};
            if (p.sigma1) j["params"]["sigma1"] = *p.sigma1;
            if (p.sigma2) j["params"]["sigma2"] = *p.sigma2;
            j["log_likelihood"] = report.trace.back();
            j["degenerate"] = report.degenerate;
        }
        j["iterations"] = report.iterations;
        j["converged"] = report.converged;

        if (trace_csv_path) {
            std::string csv = "iteration,objective\n";
            for (std::size_t i = 0; i < report.trace.size(); ++i) {
                csv += std::to_string(i) + "," + format_double(report.trace[i]) + "\n";
            }
            write_file(trace_csv_path, csv);
        }
        *out_json = dup_string(j.dump(2) + "\n");
        if (!*out_json) raise(ErrorCode::Io, "allocation failed");
    });
}

}  // extern "C"
