#include <doctest.h>

#include "spfcast/data.hpp"
#include "spfcast/ingest.hpp"
#include "support/synthetic.hpp"

using namespace spfcast;
using namespace spfcast::testsupport;

TEST_CASE("quarter arithmetic, parsing and ordering") {
    Quarter q(1995, 3);
    CHECK(q.str() == "1995Q3");
    CHECK(Quarter::parse("1995Q3") == q);
    CHECK(Quarter::parse("2008q1") == Quarter(2008, 1));
    CHECK(q + 2 == Quarter(1996, 1));
    CHECK(q - 3 == Quarter(1994, 4));
    CHECK(Quarter(2010, 1) - Quarter(1995, 3) == 58);
    CHECK(Quarter(1995, 3) < Quarter(1995, 4));
    CHECK_THROWS_AS(Quarter::parse("nonsense"), Error);
    CHECK_THROWS_AS(Quarter::parse("1995Q5"), Error);
    CHECK_THROWS_AS(Quarter(1995, 0), Error);

    CHECK(parse_month("1994-07") == month_index(1994, 7));
    CHECK(month_index_str(month_index(1994, 7)) == "1994-07");
    CHECK(Quarter::of_month(1994, 7) == Quarter(1994, 3));
    CHECK_THROWS_AS(parse_month("1994/07"), Error);
}

TEST_CASE("growth rate formula") {
    CHECK(growth_rate(100.0, 100.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    // ((1.005)^4 - 1) * 100
    CHECK(growth_rate(100.5, 100.0) == doctest::Approx(2.01505).epsilon(1e-4 / 2.0));
    CHECK_THROWS_AS(growth_rate(-1.0, 100.0), Error);
}

TEST_CASE("quarterly rates drop incomplete quarters") {
    VintageStore store;
    Quarter vintage(2001, 2);
    // 2000Q1..2000Q4 complete, 2001Q1 only two months.
    for (int midx = Quarter(2000, 1).index() * 3; midx < Quarter(2001, 1).index() * 3 + 2;
         ++midx) {
        store.add(vintage, midx / 12, midx % 12 + 1, 100.0 + midx % 7);
    }
    store.freeze();
    const RateSeries& rs = store.rates(vintage);
    CHECK(rs.first == Quarter(2000, 2));
    CHECK(rs.last() == Quarter(2000, 4));  // partial 2001Q1 dropped
    CHECK(rs.rates.size() == 3);
}

TEST_CASE("vintage coverage and contiguity violations are rejected") {
    VintageStore covers_future;
    // Vintage 2000Q1 must not cover 2000Q2 months.
    for (int m = 0; m < 6; ++m) {
        int midx = Quarter(2000, 1).index() * 3 + m;
        covers_future.add(Quarter(2000, 1), midx / 12, midx % 12 + 1, 100.0);
    }
    CHECK_THROWS_AS(covers_future.freeze(), Error);

    VintageStore gap;
    gap.add(Quarter(2000, 2), 2000, 1, 100.0);
    gap.add(Quarter(2000, 2), 2000, 3, 100.0);  // February missing
    CHECK_THROWS_AS(gap.freeze(), Error);
}

TEST_CASE("rate series is independent of record insertion order") {
    std::vector<double> rates = iid_rates(5, 30, 2.0, 1.0);
    std::vector<double> levels = levels_from_rates(rates);
    Quarter first(1990, 1);
    Quarter vintage = first + static_cast<int>(levels.size());

    VintageStore forward, backward;
    int n = static_cast<int>(levels.size());
    for (int qi = 0; qi < n; ++qi) {
        for (int m = 0; m < 3; ++m) {
            int midx = (first + qi).index() * 3 + m;
            forward.add(vintage, midx / 12, midx % 12 + 1, levels[qi]);
        }
    }
    for (int qi = n - 1; qi >= 0; --qi) {
        for (int m = 2; m >= 0; --m) {
            int midx = (first + qi).index() * 3 + m;
            backward.add(vintage, midx / 12, midx % 12 + 1, levels[qi]);
        }
    }
    forward.freeze();
    backward.freeze();
    CHECK(forward.rates(vintage).rates == backward.rates(vintage).rates);

    // The synthetic levels reproduce the generating rates.
    const auto& recovered = forward.rates(vintage).rates;
    REQUIRE(recovered.size() == rates.size());
    for (std::size_t i = 0; i < rates.size(); ++i) {
        CHECK(recovered[i] == doctest::Approx(rates[i]).epsilon(1e-10));
    }
}

TEST_CASE("latest vintage lookup") {
    std::vector<double> rates = iid_rates(9, 40, 2.5, 1.2);
    VintageStore store = store_from_rates(Quarter(1990, 1), rates);
    Quarter first_vintage = Quarter(1990, 1) + 1;

    CHECK(store.latest_vintage_at(first_vintage) == first_vintage);
    CHECK(store.latest_vintage_at(Quarter(2020, 1)) == Quarter(1990, 1) + 40);
    CHECK_THROWS_AS(store.latest_vintage_at(first_vintage - 1), Error);

    // A hole between releases resolves to the greatest vintage below.
    VintageStore sparse;
    std::vector<double> lv = levels_from_rates(iid_rates(2, 10, 2.0, 0.5));
    for (Quarter v : {Quarter(1994, 4), Quarter(1995, 2)}) {
        int covered = v - Quarter(1992, 1);
        for (int qi = 0; qi < covered; ++qi) {
            for (int m = 0; m < 3; ++m) {
                int midx = (Quarter(1992, 1) + qi).index() * 3 + m;
                sparse.add(v, midx / 12, midx % 12 + 1, lv[qi]);
            }
        }
    }
    sparse.freeze();
    CHECK(sparse.latest_vintage_at(Quarter(1995, 1)) == Quarter(1994, 4));
}

TEST_CASE("panel summary conventions") {
    SurveyPanel panel;
    panel.add(Quarter(2000, 1), 1, "a", 1.0);
    panel.add(Quarter(2000, 1), 1, "b", 2.0);
    panel.add(Quarter(2000, 1), 1, "c", 3.0);
    panel.add(Quarter(2000, 1), 1, "d", 100.0);
    panel.add(Quarter(2000, 2), 1, "a", 5.0);
    panel.freeze();

    PanelSummary s = spf_summary(panel, Quarter(2000, 1), 1);
    CHECK(s.median == doctest::Approx(2.5));  // even-count averaging
    CHECK(s.n == 4);
    // n-1 variance of {1,2,3,100}
    double mean = 26.5;
    double expected = ((1 - mean) * (1 - mean) + (2 - mean) * (2 - mean) +
                       (3 - mean) * (3 - mean) + (100 - mean) * (100 - mean)) /
                      3.0;
    CHECK(s.variance == doctest::Approx(expected).epsilon(1e-12));
    CHECK(s.median >= 1.0);
    CHECK(s.median <= 100.0);

    CHECK_THROWS_AS(spf_summary(panel, Quarter(2000, 2), 1), Error);  // single member
    CHECK_THROWS_AS(spf_summary(panel, Quarter(2001, 1), 1), Error);  // absent

    SurveyPanel equal;
    equal.add(Quarter(2000, 1), 1, "a", 2.0);
    equal.add(Quarter(2000, 1), 1, "b", 2.0);
    equal.freeze();
    CHECK(spf_summary(equal, Quarter(2000, 1), 1).variance == 0.0);

    CHECK_THROWS_AS(panel.add(Quarter(2009, 1), 1, "x", 1.0), Error);  // frozen
    SurveyPanel dup;
    dup.add(Quarter(2000, 1), 1, "a", 1.0);
    CHECK_THROWS_AS(dup.add(Quarter(2000, 1), 1, "a", 1.5), Error);
}

TEST_CASE("no-change window") {
    std::vector<double> constant(30, 2.0);
    VintageStore store = store_from_rates(Quarter(1990, 1), constant);
    Ensemble w = pnc_window(Quarter(2000, 1), 20, store);
    CHECK(w.size() == 20);
    CHECK(w.median() == doctest::Approx(2.0).epsilon(1e-12));

    // Window of 1..20 has median 10.5.
    std::vector<double> ramp;
    for (int i = 1; i <= 20; ++i) ramp.push_back(static_cast<double>(i));
    VintageStore ramp_store = store_from_rates(Quarter(1990, 1), ramp);
    Quarter last_vintage = Quarter(1990, 1) + 21;
    Ensemble rw = pnc_window(last_vintage, 20, ramp_store);
    CHECK(rw.median() == doctest::Approx(10.5));
    CHECK_THROWS_AS(pnc_window(last_vintage, 21, ramp_store), Error);
}

TEST_CASE("no-change window sees only issue-time data") {
    std::vector<double> rates = iid_rates(13, 50, 2.0, 1.5);
    VintageStore base = store_from_rates(Quarter(1990, 1), rates);
    Quarter issue(1999, 1);
    Ensemble before = pnc_window(issue, 20, base);

    // Mutate every observation in vintages released after the issue quarter.
    VintageStore tampered = store_from_rates_with(
        Quarter(1990, 1), rates, [&](Quarter vintage, Quarter, double level) {
            return vintage > issue ? level * 1.37 + 5.0 : level;
        });
    Ensemble after = pnc_window(issue, 20, tampered);
    CHECK(before.members == after.members);
}

TEST_CASE("realized rates come from the evaluation vintage only") {
    std::vector<double> rates = iid_rates(21, 40, 3.0, 1.0);
    VintageStore store = store_from_rates(Quarter(1990, 1), rates);
    Quarter eval_vintage = Quarter(1990, 1) + 40;  // covers everything

    CHECK(store.realized(Quarter(1995, 1), eval_vintage) ==
          doctest::Approx(rates[Quarter(1995, 1) - Quarter(1990, 1)]).epsilon(1e-10));
    CHECK_THROWS_AS(store.realized(eval_vintage + 1, eval_vintage), Error);

    // Adding a newer vintage never changes an older vintage's answers.
    const RateSeries& rs = store.rates(store.latest_vintage_at(Quarter(1995, 1)));
    std::vector<double> snapshot = rs.rates;
    // (store is frozen; rebuild with an extra vintage appended)
    std::vector<double> more = rates;
    more.push_back(9.9);
    VintageStore grown = store_from_rates(Quarter(1990, 1), more);
    CHECK(grown.rates(grown.latest_vintage_at(Quarter(1995, 1))).rates == snapshot);
}

TEST_CASE("covariate rows mirror the live forecasters") {
    std::vector<double> rates = iid_rates(29, 60, 2.0, 1.0);
    Quarter first(1985, 1);
    VintageStore store = store_from_rates(first, rates);
    SurveyPanel panel = panel_around_rates(first, rates, Quarter(1990, 1), Quarter(1999, 4), 6,
                                           0.2, 0.5, 7);

    Quarter origin(1998, 2);
    auto row = covariate_row(origin, 2, origin, store, panel, 20);
    REQUIRE(row.has_value());
    PanelSummary s = spf_summary(panel, origin, 2);
    CHECK(row->mu_spf == doctest::Approx(s.median).epsilon(1e-12));
    CHECK(row->sigma2_spf == doctest::Approx(s.variance).epsilon(1e-12));
    Ensemble live = pnc_window(origin, 20, store);
    CHECK(row->mu_pnc == doctest::Approx(live.median()).epsilon(1e-12));
    CHECK_FALSE(row->realized.has_value());  // target not yet covered at issue

    // Training row: realized present, no-change stats reconstructed at the
    // row's origin from the issue vintage.
    auto trow = covariate_row(origin - 8, 2, origin, store, panel, 20);
    REQUIRE(trow.has_value());
    REQUIRE(trow->realized.has_value());
    int target_idx = (origin - 8 + 1) - first;
    CHECK(*trow->realized == doctest::Approx(rates[target_idx]).epsilon(1e-10));

    // Missing panel -> no row.
    CHECK_FALSE(covariate_row(Quarter(1987, 1), 2, origin, store, panel, 20).has_value());
}

TEST_CASE("csv ingestion round trip") {
    std::vector<double> rates = iid_rates(3, 25, 2.0, 1.0);
    Quarter first(1990, 1);
    VintageStore store = store_from_rates(first, rates);
    SurveyPanel panel = panel_around_rates(first, rates, Quarter(1992, 1), Quarter(1994, 4), 4,
                                           0.0, 0.4, 9);

    std::string cpi_csv = cpi_to_csv(store);
    std::string spf_csv = spf_to_csv(panel);
    VintageStore store2 = parse_cpi_csv(cpi_csv);
    SurveyPanel panel2 = parse_spf_csv(spf_csv);
    CHECK(cpi_to_csv(store2) == cpi_csv);
    CHECK(spf_to_csv(panel2) == spf_csv);
    CHECK(store2.rates(store2.latest_vintage_at(Quarter(1995, 1))).rates ==
          store.rates(store.latest_vintage_at(Quarter(1995, 1))).rates);

    CHECK_THROWS_AS(parse_cpi_csv("not,a,header\n1,2,3\n"), Error);
    CHECK_THROWS_AS(parse_cpi_csv("vintage,month,level\n1995Q1,1994-13,100\n"), Error);
    CHECK_THROWS_AS(parse_cpi_csv("vintage,month,level\n1995Q1,1994-12,abc\n"), Error);
    CHECK_THROWS_AS(parse_spf_csv("origin,horizon,forecaster_id,value\n1995Q1,9,x,1.0\n"),
                    Error);
}
