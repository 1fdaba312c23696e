#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "auditlab/errors.hpp"
#include "auditlab/harness/config.hpp"
#include "auditlab/harness/dataset.hpp"
#include "auditlab/harness/results.hpp"
#include "auditlab/harness/sweeps.hpp"
#include "auditlab/io/text.hpp"
#include "doctest.h"

using namespace auditlab;

namespace {

const std::string kFixtures = AUDITLAB_FIXTURE_DIR;

ResultRow sample_row() {
    ResultRow r;
    r.algorithm = "RS-Audit";
    r.sweep_value = 0.1;
    r.cost_pair = {0.5, 3.0};
    r.mean_cost = 1234.5678912;
    r.std_cost = 1.0 / 3.0;
    r.mean_labels = 10;
    r.std_labels = 0;
    r.mean_samples = 20;
    r.mean_delta_hat = 0.125;
    r.std_delta_hat = 0.01;
    r.true_eod = 0.15;
    r.correctness_fraction = 0.8;
    r.n_seeds = 5;
    r.capped = true;
    r.mean_label_cost = 7.5;
    return r;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

Json small_blackbox() {
    return Json{{"mode", "blackbox"},
                {"instance", {{"kind", "synthetic_tabular"}, {"n_rows", 2000}}},
                {"classifier", {{"kind", "all_LR"}, {"train_size", 300}}},
                {"tau_sweep", {5, 20}},
                {"cost_pairs", {{0.5, 1.0}, {0, 1}}},
                {"seeds", {1, 2, 3}},
                {"past_db_size", 20000}};
}

}  // namespace

TEST_CASE("adult fixture ingests and encodes") {
    const Dataset d = ingest_adult(kFixtures + "/adult_200.csv");
    CHECK(d.size() == 200);
    const EncodingSpec spec = fit_encoding(d);
    const LabeledData enc = encode(d, spec);
    CHECK(enc.dim == spec.width());
    CHECK(enc.dim == spec.feature_names().size());
    for (int v : enc.y) CHECK((v == 0 || v == 1));
    std::ostringstream out;
    write_encoded_csv(out, enc, spec.feature_names());
    std::istringstream in(out.str());
    const LabeledData back = read_encoded_csv(in);
    CHECK(back.y == enc.y);
    CHECK(back.a == enc.a);
    CHECK(back.dim == enc.dim);
}

TEST_CASE("law fixture ingests") {
    const Dataset d = ingest_law(kFixtures + "/law_200.csv");
    CHECK(d.size() == 200);
}

TEST_CASE("adult label spellings") {
    const std::string header =
        "age,workclass,fnlwgt,education,educational-num,marital-status,occupation,relationship,"
        "race,gender,capital-gain,capital-loss,hours-per-week,native-country,income\n";
    const std::string row = "30,Private,1000,Bachelors,13,Never-married,Sales,Own-child,White,Female,0,0,40,"
                            "United-States,";
    std::istringstream in(header + row + "\xe2\x89\xa4" "50K\n" + row + ">50K.\n" + row + "<=50K\n");
    const Dataset d = ingest(in, adult_schema());
    CHECK(d.y == std::vector<int>{0, 1, 0});
    CHECK(d.a == std::vector<int>{0, 0, 0});

    std::string no_gender = header;
    no_gender.replace(no_gender.find("gender,"), 7, "");
    std::istringstream bad(no_gender);
    CHECK_THROWS_AS(ingest(bad, adult_schema()), SchemaError);
}

TEST_CASE("law range and label checks") {
    const std::string header = "decile1b,decile3,lsat,ugpa,zfygpa,zgpa,fulltime,fam_inc,male,tier,racetxt,pass_bar\n";
    std::istringstream ok(header + "5,9,43.8,3.2,-0.63,-1.15,1,1,0,6,White,1\n");
    const Dataset d = ingest(ok, law_schema());
    CHECK(d.y == std::vector<int>{1});

    std::istringstream bad(header + "5,9,43.8,3.2,-0.63,-1.15,1,1,0,6,White,1\n5,9,60,3.2,-0.63,-1.15,1,1,0,6,White,1\n");
    try {
        ingest(bad, law_schema());
        FAIL("expected RowError");
    } catch (const RowError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("results csv layout") {
    std::ostringstream out;
    write_results_csv(out, {sample_row()});
    const auto lines = lines_of(out.str());
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] ==
          "algorithm,sweep_value,cost_pair,mean_cost,std_cost,mean_labels,std_labels,mean_samples,"
          "mean_delta_hat,std_delta_hat,true_eod,correctness_fraction,n_seeds,capped,truncated_run,"
          "premise_violated,mean_label_cost");
    CHECK(lines[1] == "RS-Audit,0.1,0.5:3,1234.57,0.333333,10,0,20,0.125,0.01,0.15,0.8,5,1,0,0,7.5");
    CHECK(io::format_sig6(1234.5678912) == "1234.57");
}

TEST_CASE("results roundtrip through csv and json") {
    ResultRow r = sample_row();
    r.mean_cost = 1234.57;
    r.std_cost = 0.333333;
    ResultRow unscored = r;
    unscored.algorithm = "Baseline";
    unscored.correctness_fraction.reset();
    const std::vector<ResultRow> rows{unscored, r};
    std::stringstream csv, json;
    write_results_csv(csv, rows);
    write_results_json(json, rows);
    CHECK(read_results_csv(csv) == rows);
    CHECK(read_results_json(json) == rows);
}

TEST_CASE("emit and parse") {
    const auto dir = std::filesystem::temp_directory_path() / "auditlab_results_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "r.csv").string();
    emit_results({sample_row()}, path, ResultFormat::csv);
    CHECK(parse_results(path, ResultFormat::csv).size() == 1);
    CHECK_THROWS_AS(emit_results({}, path, ResultFormat::csv), DomainError);
    CHECK_THROWS_AS(emit_results({sample_row()}, (dir / "missing" / "r.csv").string(), ResultFormat::csv), IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("population statistics") {
    const MeanStd m = mean_std({1, 2, 3});
    CHECK(m.mean == 2.0);
    CHECK(m.std == doctest::Approx(std::sqrt(2.0 / 3.0)));
    CHECK_THROWS_AS(mean_std({}), DomainError);
}

TEST_CASE("ground truth bands") {
    CHECK(ground_truth(0.15, 0.1) == Truth::unfair);
    CHECK(ground_truth(0.04, 0.1) == Truth::fair);
    CHECK(ground_truth(0.05, 0.1) == Truth::premise_violated);
    CHECK(ground_truth(0.1, 0.1) == Truth::premise_violated);
}

TEST_CASE("aggregate evaluates every cost pair from the same counters") {
    RunRecord a{"RS-Audit", 0.5, 1, 10, 4, 6, 100, 0.1, Verdict::fair, 0.15, false, false};
    RunRecord b = a;
    b.seed = 2;
    b.n_label_requests = 20;
    b.verdict = Verdict::unfair;
    const auto rows = aggregate({a, b}, {{0.5, 1.0}, {0.0, 1.0}}, true);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].cost_pair == CostModel{0.0, 1.0});
    CHECK(rows[0].mean_cost == 6.0);
    CHECK(rows[1].mean_cost == doctest::Approx(0.5 * ((14 + 24) / 2.0) + 6.0));
    CHECK(rows[1].mean_labels == 15.0);
    CHECK(rows[1].std_labels == 5.0);
    CHECK(rows[1].correctness_fraction == 0.5);
    CHECK(cost_of(a, {0.5, 3.0}) == 0.5 * 14 + 3.0 * 6);
}

TEST_CASE("config errors") {
    Json j = small_blackbox();
    CHECK_NOTHROW(parse_config(j, ""));
    j["seeds"] = Json::array();
    CHECK_THROWS_AS(parse_config(j, ""), ConfigError);
    j["seeds"] = {1, 1};
    CHECK_THROWS_AS(parse_config(j, ""), ConfigError);
    j = small_blackbox();
    j["colour"] = "blue";
    CHECK_THROWS_AS(parse_config(j, ""), ConfigError);
    j = small_blackbox();
    j["caps"] = {{"tau_cap", 0.5}};
    CHECK_THROWS_AS(parse_config(j, ""), ConfigError);
    j = small_blackbox();
    j["cost_pairs"] = {"0.5:x"};
    CHECK_THROWS_AS(parse_config(j, ""), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("cost pair text") {
    CHECK(format_cost_pair({0.5, 3.0}) == "0.5:3");
    CHECK(parse_cost_pair("0:1") == CostModel{0.0, 1.0});
}

TEST_CASE("parallel_for runs every index and rethrows the lowest failure") {
    std::atomic<int> ran{0};
    try {
        parallel_for(10, 2, [&](std::size_t i) {
            ++ran;
            if (i == 7) throw DomainError("seven");
            if (i == 3) throw DomainError("three");
        });
        FAIL("expected an exception");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("three") != std::string::npos);
    }
    CHECK(ran == 10);
}

TEST_CASE("blackbox sweep is deterministic across thread counts") {
    ExperimentConfig c = parse_config(small_blackbox(), "");
    c.threads = 1;
    const SweepOutput one = run_blackbox_sweep(c);
    c.threads = 2;
    const SweepOutput two = run_blackbox_sweep(c);
    CHECK(one.rows == two.rows);
    CHECK(one.rows.size() == 2 * 2 * 2);
    for (const auto& r : one.rows) {
        CHECK_FALSE(r.correctness_fraction.has_value());
        CHECK(r.n_seeds == 3);
    }
    c.seed_offset = 5;
    CHECK_FALSE(run_blackbox_sweep(c).rows == one.rows);
}

TEST_CASE("lower-bound check rejects an invalid case") {
    Json j{{"mode", "lower_bound_check"},
           {"lower_bound", {{"cases", {{{"eps", "0.3"}, {"p", "0.3"}, {"q", "0.3"}}}}, {"slope_eps", Json::array()}}}};
    const ExperimentConfig c = parse_config(j, "");
    CHECK_THROWS_AS(run_lower_bound_check(c), DomainError);
}

TEST_CASE("lower-bound exact cases") {
    Json j{{"mode", "lower_bound_check"},
           {"lower_bound", {{"cases", {{{"eps", "1/20"}, {"p", "1/5"}, {"q", "2/5"}}}}, {"slope_eps", Json::array()}}}};
    const LowerBoundReport r = run_lower_bound_check(parse_config(j, ""));
    REQUIRE(r.cases.size() == 1);
    CHECK(r.cases[0].fair_exact);
    CHECK(r.cases[0].unfair_exact);
    CHECK(r.cases[0].fair_eod == "0");
    CHECK(r.cases[0].unfair_eod == "1/12");
    CHECK(r.cases[0].expected_unfair_eod == "1/12");
    CHECK_FALSE(r.slope.has_value());
}

TEST_CASE("log-log slope") {
    CHECK(loglog_slope({1, 10, 100}, {2, 20, 200}) == doctest::Approx(1.0));
    CHECK(loglog_slope({1, 4}, {1, 2}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(loglog_slope({1}, {1}), DomainError);
    CHECK_THROWS_AS(loglog_slope({1, 0}, {1, 1}), DomainError);
}
