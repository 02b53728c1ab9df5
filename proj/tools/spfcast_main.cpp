// spfcast command-line driver. Talks to the engine exclusively through the
// shared library's C interface.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spfcast.h"

namespace {

int fail(int status) {
    std::fprintf(stderr, "error (%s): %s\n", spfcast_status_name(status),
                 spfcast_last_error());
    return 1;
}

struct StoreHandle {
    spfcast_store* ptr = nullptr;
    ~StoreHandle() { spfcast_store_free(ptr); }
};

int open_store(const std::string& store_dir, const std::string& cpi, const std::string& spf,
               StoreHandle& handle) {
    if (!store_dir.empty()) return spfcast_store_open(store_dir.c_str(), &handle.ptr);
    return spfcast_store_open_csv(cpi.c_str(), spf.c_str(), &handle.ptr);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probabilistic inflation-forecast construction and evaluation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", spfcast_version());

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Validate input CSVs and write a store");
    std::string in_cpi, in_spf, ingest_out;
    ingest->add_option("--cpi", in_cpi, "cpi_vintages.csv path")->required();
    ingest->add_option("--spf", in_spf, "spf_panel.csv path")->required();
    ingest->add_option("--out", ingest_out, "store directory to create")->required();

    // backtest
    auto* backtest = app.add_subcommand("backtest", "Run the rolling-origin evaluation");
    std::string bt_config, bt_out, bt_store, bt_cpi, bt_spf;
    backtest->add_option("--config", bt_config, "key=value config file");
    backtest->add_option("--out", bt_out, "output directory")->required();
    auto* bt_store_opt = backtest->add_option("--store", bt_store, "store directory");
    backtest->add_option("--cpi", bt_cpi, "cpi_vintages.csv (alternative to --store)")
        ->excludes(bt_store_opt);
    backtest->add_option("--spf", bt_spf, "spf_panel.csv (alternative to --store)")
        ->excludes(bt_store_opt);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Sweep rolling window lengths");
    std::string sw_config, sw_out, sw_store, sw_cpi, sw_spf, sw_lengths;
    sweep->add_option("--config", sw_config, "key=value config file");
    sweep->add_option("--lengths", sw_lengths, "comma-separated lengths, e.g. 8,12,20,40")
        ->required();
    sweep->add_option("--out", sw_out, "output directory")->required();
    auto* sw_store_opt = sweep->add_option("--store", sw_store, "store directory");
    sweep->add_option("--cpi", sw_cpi, "cpi_vintages.csv")->excludes(sw_store_opt);
    sweep->add_option("--spf", sw_spf, "spf_panel.csv")->excludes(sw_store_opt);

    // report
    auto* report = app.add_subcommand("report", "Render tables from a finished run");
    std::string rp_dir, rp_format = "md", rp_out;
    report->add_option("--in", rp_dir, "run directory (backtest --out)")->required();
    report->add_option("--format", rp_format, "md or csv")
        ->check(CLI::IsMember({"md", "csv"}));
    report->add_option("--out", rp_out, "write to file instead of stdout");

    // fit
    auto* fit = app.add_subcommand("fit", "Fit one postprocessing model at an origin");
    std::string ft_config, ft_store, ft_cpi, ft_spf, ft_origin, ft_method, ft_trace;
    int ft_horizon = 1;
    bool ft_want_trace = false;
    fit->add_option("--config", ft_config, "key=value config file");
    fit->add_option("--origin", ft_origin, "origin quarter, e.g. 2008Q1")->required();
    fit->add_option("--horizon", ft_horizon, "prediction horizon 1..5")->required();
    fit->add_option("--method", ft_method, "hr1, hr2, gm1 or gm2")->required();
    fit->add_flag("--trace", ft_want_trace, "also write the objective trace CSV");
    fit->add_option("--trace-out", ft_trace, "trace CSV path (default <origin>_<method>_trace.csv)");
    auto* ft_store_opt = fit->add_option("--store", ft_store, "store directory");
    fit->add_option("--cpi", ft_cpi, "cpi_vintages.csv")->excludes(ft_store_opt);
    fit->add_option("--spf", ft_spf, "spf_panel.csv")->excludes(ft_store_opt);

    CLI11_PARSE(app, argc, argv);

    if (*ingest) {
        int rc = spfcast_ingest(in_cpi.c_str(), in_spf.c_str(), ingest_out.c_str());
        if (rc != SPFCAST_OK) return fail(rc);
        std::printf("store written to %s\n", ingest_out.c_str());
        return 0;
    }

    if (*backtest) {
        StoreHandle store;
        int rc = open_store(bt_store, bt_cpi, bt_spf, store);
        if (rc != SPFCAST_OK) return fail(rc);
        rc = spfcast_backtest(store.ptr, bt_config.empty() ? nullptr : bt_config.c_str(),
                              bt_out.c_str());
        if (rc != SPFCAST_OK) return fail(rc);
        std::printf("run written to %s\n", bt_out.c_str());
        return 0;
    }

    if (*sweep) {
        StoreHandle store;
        int rc = open_store(sw_store, sw_cpi, sw_spf, store);
        if (rc != SPFCAST_OK) return fail(rc);
        rc = spfcast_sweep(store.ptr, sw_config.empty() ? nullptr : sw_config.c_str(),
                           sw_lengths.c_str(), sw_out.c_str());
        if (rc != SPFCAST_OK) return fail(rc);
        std::printf("sweep written to %s/sweep.csv\n", sw_out.c_str());
        return 0;
    }

    if (*report) {
        char* text = nullptr;
        int rc = spfcast_report(rp_dir.c_str(), rp_format.c_str(), &text);
        if (rc != SPFCAST_OK) return fail(rc);
        if (rp_out.empty()) {
            std::fputs(text, stdout);
        } else {
            FILE* f = std::fopen(rp_out.c_str(), "wb");
            if (!f) {
                spfcast_free(text);
                std::fprintf(stderr, "error: cannot write %s\n", rp_out.c_str());
                return 1;
            }
            std::fputs(text, f);
            std::fclose(f);
        }
        spfcast_free(text);
        return 0;
    }

    if (*fit) {
        StoreHandle store;
        int rc = open_store(ft_store, ft_cpi, ft_spf, store);
        if (rc != SPFCAST_OK) return fail(rc);
        std::string trace_path = ft_trace;
        if (ft_want_trace && trace_path.empty()) {
            trace_path = ft_origin + "_h" + std::to_string(ft_horizon) + "_" + ft_method +
                         "_trace.csv";
        }
        char* json = nullptr;
        rc = spfcast_fit(store.ptr, ft_config.empty() ? nullptr : ft_config.c_str(),
                         ft_origin.c_str(), ft_horizon, ft_method.c_str(),
                         trace_path.empty() ? nullptr : trace_path.c_str(), &json);
        if (rc != SPFCAST_OK) return fail(rc);
        std::fputs(json, stdout);
        spfcast_free(json);
        if (!trace_path.empty()) std::printf("trace written to %s\n", trace_path.c_str());
        return 0;
    }

    return 0;
}
