// Drives the installed CLI binary end to end over synthetic data. The
// binary's path arrives via SPFCAST_CLI (set by ctest); without it the
// checks are skipped so the test binary stays usable standalone.

#include <cstdlib>
#include <filesystem>
#include <string>

#include <doctest.h>

#include "spfcast/csv.hpp"
#include "spfcast/ingest.hpp"
#include "support/synthetic.hpp"

using namespace spfcast;
using namespace spfcast::testsupport;

namespace {

int run(const std::string& command) { return std::system(command.c_str()); }

}  // namespace

TEST_CASE("cli pipeline: ingest, backtest, report, sweep, fit") {
    const char* cli = std::getenv("SPFCAST_CLI");
    if (!cli || !*cli) {
        MESSAGE("SPFCAST_CLI not set; skipping CLI pipeline test");
        return;
    }
    std::string bin(cli);
    auto dir = std::filesystem::temp_directory_path() / "spfcast_cli_e2e";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);

    Quarter first(1980, 1);
    std::vector<double> rates = iid_rates(777, 100, 2.5, 1.4);
    VintageStore store = store_from_rates(first, rates);
    SurveyPanel panel = panel_around_rates(first, rates, first + 8, first + 99, 5, 0.1, 0.6, 3);
    write_file((dir / "cpi.csv").string(), cpi_to_csv(store));
    write_file((dir / "spf.csv").string(), spf_to_csv(panel));
    write_file((dir / "config.txt").string(),
               "test_start = 1995Q1\n"
               "test_end = 1996Q4\n"
               "evaluation_vintage = " + (first + 100).str() + "\n"
               "horizons = 1,2\n"
               "methods = spf, pnc, tnc\n");

    std::string q = dir.string();
    CHECK(run(bin + " --version > /dev/null") == 0);
    CHECK(run(bin + " ingest --cpi " + q + "/cpi.csv --spf " + q + "/spf.csv --out " + q +
              "/store > /dev/null") == 0);
    CHECK(run(bin + " backtest --store " + q + "/store --config " + q +
              "/config.txt --out " + q + "/run > /dev/null") == 0);
    CHECK(std::filesystem::exists(dir / "run" / "scores.csv"));

    CHECK(run(bin + " report --in " + q + "/run --format md --out " + q + "/report.md") == 0);
    std::string md = read_file((dir / "report.md").string());
    CHECK(md.find("Mean absolute error") != std::string::npos);
    CHECK(run(bin + " report --in " + q + "/run --format csv > " + q + "/report.csv") == 0);

    CHECK(run(bin + " sweep --store " + q + "/store --config " + q +
              "/config.txt --lengths 12,20 --out " + q + "/run > /dev/null") == 0);
    CHECK(std::filesystem::exists(dir / "run" / "sweep.csv"));

    CHECK(run(bin + " fit --store " + q + "/store --config " + q +
              "/config.txt --origin 1996Q1 --horizon 2 --method gm2 > " + q + "/fit.json") ==
          0);
    CHECK(read_file((dir / "fit.json").string()).find("alpha") != std::string::npos);

    // Two identical backtests produce byte-identical run files.
    CHECK(run(bin + " backtest --store " + q + "/store --config " + q +
              "/config.txt --out " + q + "/run2 > /dev/null") == 0);
    CHECK(read_file((dir / "run" / "scores.csv").string()) ==
          read_file((dir / "run2" / "scores.csv").string()));
    CHECK(read_file((dir / "run" / "losses.csv").string()) ==
          read_file((dir / "run2" / "losses.csv").string()));

    // Bad inputs exit nonzero with a diagnostic.
    CHECK(run(bin + " backtest --store " + q + "/nowhere --out " + q +
              "/x 2> /dev/null > /dev/null") != 0);
    CHECK(run(bin + " report --in " + q + "/run --format pdf 2> /dev/null > /dev/null") != 0);

    std::filesystem::remove_all(dir);
}
