#include <cmath>
#include <memory>

#include "auditlab/audit/blackbox.hpp"
#include "auditlab/errors.hpp"
#include "auditlab/instances/classifiers.hpp"
#include "auditlab/instances/empirical.hpp"
#include "auditlab/instances/lower_bound.hpp"
#include "auditlab/instances/summary.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace auditlab;
using testing::ScriptedInstance;
using testing::ScriptedRow;

namespace {

PastDatabase scripted_db(const std::vector<ScriptedRow>& rows) {
    PastDatabase db(1);
    for (const auto& r : rows)
        db.append(std::vector<double>{0.0}, r.a, r.f, r.f ? std::optional<int>(r.y) : std::nullopt);
    return db;
}

std::size_t past_rows_for(const PopulationSummary& s, double tau) {
    double m = 1.0;
    for (int y = 0; y < 2; ++y)
        for (double p : s.p_joint[y]) m = std::min(m, p);
    return static_cast<std::size_t>(1.3 * std::ceil(tau) / m) + 1000;
}

}  // namespace

TEST_CASE("compute tau") {
    CHECK(compute_tau(0.5, 0.08, 2) == doctest::Approx(576 * std::log(200.0) / 0.25));
    CHECK(compute_tau(0.5, 0.08, 2) == doctest::Approx(12207.3).epsilon(1e-5));
    CHECK(compute_tau(0.1, 0.05, 2) == doctest::Approx(332255.29).epsilon(1e-7));
    CHECK(compute_tau(0.05, 0.05, 2) == doctest::Approx(4 * compute_tau(0.1, 0.05, 2)));
    CHECK_THROWS_AS(compute_tau(0.0, 0.1, 2), DomainError);
    CHECK_THROWS_AS(compute_tau(0.1, 1.0, 2), DomainError);
    CHECK_THROWS_AS(compute_tau(0.1, 0.1, 1), DomainError);
}

TEST_CASE("decision rule") {
    CHECK(decide(0.3, 0.5) == Verdict::unfair);
    CHECK(decide(0.25, 0.5) == Verdict::fair);
    CHECK(decide(0.0, 0.01) == Verdict::fair);
    CHECK(decide(0.0, 0.99) == Verdict::fair);
}

TEST_CASE("online sample counts only the target group and rejects others for free") {
    // Group 0 labels [1, 0, 1] interleaved with group-1 draws; f = 0 throughout.
    auto inst = std::make_shared<ScriptedInstance>(std::vector<ScriptedRow>{
        {0, 1, 0}, {0, 0, 1}, {0, 0, 0}, {0, 1, 1}, {0, 1, 0}});
    PartialFeedbackEnv env(inst, std::make_shared<testing::FirstCoordinate>(), {0.5, 3.0}, RngStream(0));
    CHECK(online_sample(env, 2, 1, 0) == 3);
    CHECK(env.ledger().n_drawn() == 5);
    CHECK(env.ledger().n_label_requests() == 3);  // only the A = 0 draws were paid for
    CHECK(env.ledger().total_cost() == doctest::Approx(3 * 0.5 + 3.0));
}

TEST_CASE("online sample concentrates at q = 0.5") {
    // x uniform on 0..9 with y = 1{x < 5}, so q = 0.5 in both groups.
    LabeledData d;
    d.dim = 1;
    for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 10; ++i) d.push_back(std::vector<double>{double(i)}, a, i < 5 ? 1 : 0);
    auto half = std::make_shared<EmpiricalAuditInstance>(d);
    int ok = 0;
    const int trials = 500;
    for (int t = 0; t < trials; ++t) {
        PartialFeedbackEnv env(half, std::make_shared<ConstantClassifier>(0), {0, 1}, RngStream(t));
        const double ratio = double(online_sample(env, 2000, 1, 0)) / 2000.0;
        ok += ratio >= 2 * 0.8 && ratio <= 2 * 1.2;
    }
    CHECK(ok >= 0.98 * trials);
}

TEST_CASE("past sample counting") {
    const PastDatabase db = scripted_db({{1, 1, 0}, {0, 0, 0}, {1, 1, 0}});
    CHECK(past_sample(db, 2, 1, 0, Conditioning::per_group) == 3);
    CHECK(past_sample(db, 2, 1, 0, Conditioning::joint) == 3);
    const PastDatabase mixed = scripted_db({{1, 1, 0}, {1, 1, 1}, {0, 0, 1}, {1, 1, 0}});
    CHECK(past_sample(mixed, 2, 1, 0, Conditioning::per_group) == 2);
    CHECK(past_sample(mixed, 2, 1, 0, Conditioning::joint) == 4);
    CHECK_THROWS_AS(past_sample(scripted_db({{0, 0, 0}, {0, 0, 1}}), 1, 1, 0, Conditioning::joint),
                    InsufficientHistory);
}

TEST_CASE("classifier f = 1 makes every audit free") {
    auto inst = std::make_shared<EmpiricalAuditInstance>(testing::symmetric_rows(40, 60));
    auto one = std::make_shared<ConstantClassifier>(1);
    RngStream rng(1);
    const PastDatabase db = generate_past_database(*inst, *one, 20000, rng);
    AuditOptions o;
    o.tau_override = 200;
    for (int alg = 0; alg < 2; ++alg) {
        PartialFeedbackEnv env(inst, one, {0.5, 3.0}, RngStream(alg));
        const AuditReport r = alg ? rs_audit(env, db, 0.2, 0.1, o) : baseline_audit(env, db, 0.2, 0.1, o);
        CHECK(r.cost == 0.0);
        CHECK(r.labels_requested == 0);
        CHECK(r.delta_hat >= 0.0);
    }
}

TEST_CASE("report invariants and capping") {
    auto inst = std::make_shared<EmpiricalAuditInstance>(testing::symmetric_rows(40, 60));
    auto clf = std::make_shared<GroupHalfspaceClassifier>(std::vector<Vector>{{1.0}, {1.0}}, Vector{2.5, 1.5});
    RngStream rng(2);
    const PastDatabase db = generate_past_database(*inst, *clf, 50000, rng);
    AuditOptions o;
    o.tau_cap = 300;
    PartialFeedbackEnv env(inst, clf, {0.5, 1.0}, RngStream(9));
    const AuditReport r = rs_audit(env, db, 0.3, 0.1, o);
    CHECK(r.capped);
    CHECK(r.tau_used == 300.0);
    CHECK(r.cost == env.ledger().total_cost());
    CHECK((r.verdict == Verdict::unfair) == (r.delta_hat > 0.15));
    CHECK(r.estimates.conditioning == Conditioning::per_group);
    for (int y = 0; y < 2; ++y)
        for (double v : r.estimates.q_hat[y]) {
            CHECK(v > 0.0);
            CHECK(v <= 1.0);
        }
    CHECK(r.algorithm == "RS-Audit");

    PartialFeedbackEnv env2(inst, clf, {0.5, 1.0}, RngStream(9));
    const AuditReport b = baseline_audit(env2, db, 0.3, 0.1, o);
    CHECK(b.estimates.conditioning == Conditioning::joint);
    CHECK(b.algorithm == "Baseline");
}

TEST_CASE("draw cap truncates a run") {
    auto inst = std::make_shared<EmpiricalAuditInstance>(testing::symmetric_rows(40, 60));
    auto clf = std::make_shared<GroupHalfspaceClassifier>(std::vector<Vector>{{1.0}, {1.0}}, Vector{2.5, 1.5});
    RngStream rng(2);
    const PastDatabase db = generate_past_database(*inst, *clf, 100000, rng);
    AuditOptions o;
    o.tau_override = 1000;
    o.draw_cap = 500;
    PartialFeedbackEnv env(inst, clf, {0.5, 1.0}, RngStream(4));
    const AuditReport r = rs_audit(env, db, 0.3, 0.1, o);
    CHECK(r.truncated_run);
    CHECK(env.ledger().n_drawn() <= 4 * 500);
}

TEST_CASE("both auditors pass a fair instance at eps = 0.4, delta = 0.2") {
    auto inst = std::make_shared<EmpiricalAuditInstance>(testing::symmetric_rows(50, 50));
    // Group-blind halfspace on identical groups: Delta = 0.
    auto clf = std::make_shared<GroupHalfspaceClassifier>(std::vector<Vector>{{1.0}, {1.0}}, Vector{2.5, 2.5});
    const PopulationSummary s = population_summary(*inst, *clf, ExactMode{});
    REQUIRE(s.eod == 0.0);
    const double tau = compute_tau(0.4, 0.2, 2);
    const std::size_t rows = past_rows_for(s, tau);
    int fair[2] = {0, 0};
    const int runs = 100;
    for (int r = 0; r < runs; ++r) {
        RngStream rng(500 + r);
        const PastDatabase db = generate_past_database(*inst, *clf, rows, rng);
        for (int alg = 0; alg < 2; ++alg) {
            PartialFeedbackEnv env(inst, clf, {0.5, 1.0}, rng.split(alg));
            const AuditReport rep = alg ? rs_audit(env, db, 0.4, 0.2) : baseline_audit(env, db, 0.4, 0.2);
            fair[alg] += rep.verdict == Verdict::fair;
        }
    }
    CHECK(fair[0] >= 0.8 * runs);
    CHECK(fair[1] >= 0.8 * runs);
}

TEST_CASE("baseline flags the lower-bound UNFAIR instance at eps = 0.2") {
    auto [fair_inst, unfair_inst] = make_lower_bound_pair(0.2, 0.3, 0.3);
    auto inst = std::make_shared<LowerBoundInstance>(unfair_inst);
    auto clf = inst->classifier();
    const PopulationSummary s = population_summary(*inst, *clf, ExactMode{});
    CHECK(s.eod == doctest::Approx(0.4 / 1.8));
    const double tau = compute_tau(0.2, 0.2, 2);
    const std::size_t rows = past_rows_for(s, tau);
    int unfair = 0;
    const int runs = 10;
    for (int r = 0; r < runs; ++r) {
        RngStream rng(900 + r);
        const PastDatabase db = generate_past_database(*inst, *clf, rows, rng);
        PartialFeedbackEnv env(inst, clf, {0.5, 1.0}, rng.split(1));
        unfair += baseline_audit(env, db, 0.2, 0.2).verdict == Verdict::unfair;
    }
    CHECK(unfair >= 0.8 * runs);
}

TEST_CASE("RS-Audit requests fewer labels than Baseline on asymmetric groups") {
    auto inst = std::make_shared<EmpiricalAuditInstance>(testing::symmetric_rows(900, 100));
    auto clf = std::make_shared<GroupHalfspaceClassifier>(std::vector<Vector>{{1.0}, {1.0}}, Vector{2.5, 2.5});
    RngStream rng(31);
    const PastDatabase db = generate_past_database(*inst, *clf, 100000, rng);
    AuditOptions o;
    o.tau_override = 100;
    const int runs = 40;
    int rs_fewer = 0;
    std::vector<double> diffs;
    for (int r = 0; r < runs; ++r) {
        PartialFeedbackEnv e1(inst, clf, {0.5, 1.0}, RngStream(2 * r));
        PartialFeedbackEnv e2(inst, clf, {0.5, 1.0}, RngStream(2 * r + 1));
        const AuditReport b = baseline_audit(e1, db, 0.2, 0.1, o);
        const AuditReport s = rs_audit(e2, db, 0.2, 0.1, o);
        rs_fewer += s.labels_requested < b.labels_requested;
        diffs.push_back(double(b.labels_requested) - double(s.labels_requested));
    }
    CHECK(rs_fewer >= 0.9 * runs);
    double m = 0, v = 0;
    for (double d : diffs) m += d / runs;
    for (double d : diffs) v += (d - m) * (d - m) / (runs - 1);
    CHECK(m - 1.96 * std::sqrt(v / runs) > 0.0);
}

TEST_CASE("past sampling never touches the ledger") {
    auto inst = std::make_shared<EmpiricalAuditInstance>(testing::symmetric_rows(40, 60));
    auto clf = std::make_shared<GroupHalfspaceClassifier>(std::vector<Vector>{{1.0}, {1.0}}, Vector{2.5, 1.5});
    RngStream rng(2);
    const PastDatabase db = generate_past_database(*inst, *clf, 5000, rng);
    PartialFeedbackEnv env(inst, clf, {0.5, 1.0}, RngStream(1));
    for (int y = 0; y < 2; ++y)
        for (int a = 0; a < 2; ++a) {
            past_sample(db, 10, y, a, Conditioning::joint);
            past_sample(db, 10, y, a, Conditioning::per_group);
        }
    CHECK(env.ledger().total_cost() == 0.0);
    CHECK(env.ledger().n_drawn() == 0);
}

TEST_CASE("estimate_eod") {
    CellEstimates e;
    e.p_hat[0] = {0.2, 0.1};
    e.q_hat[0] = {0.4, 0.4};
    e.p_hat[1] = {0.3, 0.3};
    e.q_hat[1] = {0.6, 0.5};
    // |0.5 - 0.25| = 0.25 vs |0.5 - 0.6| = 0.1
    CHECK(estimate_eod(e) == doctest::Approx(0.25));
}
