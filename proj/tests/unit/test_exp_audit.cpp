#include <cmath>
#include <memory>

#include "auditlab/audit/exp_audit.hpp"
#include "auditlab/errors.hpp"
#include "auditlab/harness/sweeps.hpp"
#include "auditlab/instances/mixture.hpp"
#include "auditlab/instances/summary.hpp"
#include "auditlab/prob/sampling.hpp"
#include "auditlab/simd/kernels.hpp"
#include "doctest.h"

using namespace auditlab;

namespace {

// Exponential family without a closed-form inverse, to exercise the generic moment matcher.
class OpaqueExponential final : public ExpFamily {
public:
    OpaqueExponential() : ExpFamily({1.0 / 16.0, 4.0, 1.0, 1.0, 0.5}, ParamSet::box({-4.0}, {-0.5})), inner_(-4.0, -0.5) {}
    std::string name() const override { return "opaque_exponential"; }
    std::size_t dim() const override { return 1; }
    std::size_t point_dim() const override { return 1; }
    bool in_support(std::span<const double> x) const override { return inner_.in_support(x); }
    double log_base_measure(std::span<const double> x) const override { return inner_.log_base_measure(x); }
    void suff_stat(std::span<const double> x, std::span<double> out) const override { inner_.suff_stat(x, out); }
    double log_partition(std::span<const double> t) const override { return inner_.log_partition(t); }
    Vector grad_log_partition(std::span<const double> t) const override { return inner_.grad_log_partition(t); }
    void sample_into(std::span<const double> t, RngStream& rng, std::span<double> out) const override {
        inner_.sample_into(t, rng, out);
    }

private:
    ExponentialFamily1D inner_;
};

Vector draw_rows(const ExpFamily& fam, const Vector& theta, std::size_t n, RngStream& rng,
                 const FeaturePredicate& f) {
    Vector rows;
    Vector x(fam.point_dim());
    while (rows.size() < n * fam.point_dim()) {
        fam.sample_into(theta, rng, x);
        if (f(x)) rows.insert(rows.end(), x.begin(), x.end());
    }
    return rows;
}

double dist(const Vector& a, const Vector& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("sample gradient is T(Z') - T(z) with Z' accepted") {
    SphericalGaussian g(1, 1.0);
    RngStream rng(3);
    const Vector z{0.25}, theta{0.0};
    FeaturePredicate positive = [](std::span<const double> x) { return x[0] > 0.0 ? 1 : 0; };
    for (int i = 0; i < 200; ++i) {
        std::size_t attempts = 0;
        Vector out(1);
        sample_gradient_into(z, theta, positive, g, rng, 1000, out, &attempts);
        CHECK(out[0] + 0.25 > 0.0);
        CHECK(attempts >= 1);
    }
    FeaturePredicate never = [](std::span<const double>) { return 0; };
    CHECK_THROWS_AS(sample_gradient(z, theta, never, g, rng, 50), AcceptanceFailure);

    // E[grad] = E[Z | Z > 0] - z = sqrt(2/pi) - z for the standard normal.
    double mean = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) mean += sample_gradient(z, theta, positive, g, rng, 1000)[0] / n;
    CHECK(mean == doctest::Approx(std::sqrt(2.0 / M_PI) - 0.25).epsilon(0.02));
}

TEST_CASE("moment matching") {
    SphericalGaussian g(2, 4.0);
    const Vector pts{1.0, 2.0, 3.0, -2.0};
    const Vector th = mle_from_moments(g, pts);
    CHECK(th[0] == doctest::Approx(2.0 / 4.0));
    CHECK(th[1] == doctest::Approx(0.0));

    ExponentialFamily1D e(-4.0, -0.5);
    CHECK(mle_from_moments(e, Vector{0.25, 0.75})[0] == doctest::Approx(-2.0));

    OpaqueExponential opaque;
    CHECK_FALSE(opaque.natural_from_mean(Vector{0.5}).has_value());
    CHECK(mle_from_moments(opaque, Vector{0.25, 0.75})[0] == doctest::Approx(-2.0).epsilon(1e-5));
    // Mean 0.1 wants theta = -10, outside the box: the matcher stops on the boundary.
    CHECK(mle_from_moments(opaque, Vector{0.1})[0] == doctest::Approx(-4.0).epsilon(1e-6));
    CHECK_THROWS_AS(mle_from_moments(g, Vector{1.0, 2.0, 3.0}), DomainError);
}

TEST_CASE("projection onto the ball and the parameter set") {
    const ParamSet whole = ParamSet::whole_space(2);
    Vector p = project_to_feasible(Vector{3.0, 4.0}, Vector{0.0, 0.0}, 1.0, whole);
    CHECK(p[0] == doctest::Approx(0.6));
    CHECK(p[1] == doctest::Approx(0.8));
    p = project_to_feasible(Vector{0.1, 0.1}, Vector{0.0, 0.0}, 1.0, whole);
    CHECK(p[0] == 0.1);

    const ParamSet box = ParamSet::box({-1.0, -1.0}, {1.0, 1.0});
    p = project_to_feasible(Vector{5.0, 0.0}, Vector{0.5, 0.0}, 2.0, box);
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS(project_to_feasible(Vector{0.0, 0.0}, Vector{5.0, 5.0}, 1.0, box), InfeasibleIntersection);
    CHECK_THROWS_AS(project_to_feasible(Vector{0.0, 0.0}, Vector{0.0, 0.0}, 0.0, box), DomainError);
}

TEST_CASE("projection lands in both sets whenever they intersect") {
    RngStream rng(17);
    const ParamSet ball = ParamSet::ball({0.0, 0.0, 0.0}, 1.0);
    for (int i = 0; i < 300; ++i) {
        Vector theta0(3), theta(3);
        for (auto& v : theta0) v = -1.5 + 3.0 * rng.uniform();
        for (auto& v : theta) v = rng.normal() * 4.0;
        const double r = 0.5 + rng.uniform() * 2.0;
        // The midpoint between theta0 and its projection is in the set and within r of theta0
        // whenever the distance to the set is below 2r, so the intersection is nonempty.
        const Vector c = ball.project(theta0);
        if (dist(c, theta0) >= 0.8 * r) continue;
        const Vector p = project_to_feasible(theta, theta0, r, ball);
        CHECK(ball.contains(p, 1e-9));
        CHECK(dist(p, theta0) <= r + 1e-9);
    }
}

TEST_CASE("majority and densest candidates") {
    const std::vector<Vector> c{{0.0}, {0.01}, {5.0}};
    CHECK(majority_candidate(c, 0.1) == std::optional<std::size_t>(0));
    CHECK_FALSE(majority_candidate(c, 0.001).has_value());
    const std::vector<Vector> spread{{0.0}, {1.0}, {3.0}, {6.0}};
    CHECK_FALSE(majority_candidate(spread, 0.5).has_value());
    CHECK(densest_candidate(spread) == 1);
    CHECK_THROWS_AS(densest_candidate({}), DomainError);
}

TEST_CASE("theoretical schedule") {
    const SmoothnessConstants c;  // kappa = lambda = L = beta = 1, alpha = 1/2
    const TheoreticalSchedule s = theoretical_schedule(c, 2, 0.2, 0.01);
    CHECK(s.d_alpha == doctest::Approx(0.04 + 2.0 * std::log(2.0)));
    CHECK(s.d_alpha == doctest::Approx(1.426).epsilon(1e-3));
    CHECK(std::ceil(s.n) == 231);
    CHECK(s.eta == doctest::Approx(std::min(s.kappa_f * 0.04 / (2 * s.rho_sq), 1 / s.kappa_f)));
    CHECK(s.eta <= 1.0 / s.kappa_f);
    CHECK(s.kappa_f < c.kappa);
    CHECK(s.lambda_f > c.lambda);
    CHECK_THROWS_AS(theoretical_schedule(c, 2, 0.0, 0.1), DomainError);
}

TEST_CASE("resolved defaults") {
    SphericalGaussian g(2, 1.0);
    TruncEstConfig cfg;
    cfg.delta = 0.01;
    const ResolvedTruncEst r = resolve_trunc_est(cfg, g, 1'000'000);
    CHECK(r.n_candidates == 50);
    CHECK(r.m == 2000);
    CHECK(r.eta == doctest::Approx(0.01));
    CHECK(r.max_accept_attempts == 20);
    CHECK(r.eps_internal == doctest::Approx(0.1 / std::sqrt(3.0)));

    const ResolvedTruncEst small = resolve_trunc_est(cfg, g, 1000 + 50 * 30);
    CHECK(small.m == 30);
    CHECK_THROWS_AS(resolve_trunc_est(cfg, g, 1000), InsufficientSamples);
    cfg.fit_to_data = false;
    CHECK_THROWS_AS(resolve_trunc_est(cfg, g, 5000), InsufficientSamples);
}

TEST_CASE("TruncEst without truncation agrees with the sample-mean estimate") {
    SphericalGaussian g(2, 1.0);
    RngStream rng(5);
    FeaturePredicate all = [](std::span<const double>) { return 1; };
    const Vector rows = draw_rows(g, Vector{1.0, -1.0}, 20000, rng, all);
    TruncEstConfig cfg;
    const Vector th = trunc_est(rows, all, g, cfg, rng);
    CHECK(dist(th, mle_from_moments(g, rows)) <= 0.1);
}

TEST_CASE("TruncEst corrects halfspace truncation") {
    SphericalGaussian g(2, 1.0);
    const Vector truth{0.5, 0.0};
    RngStream rng(11);
    FeaturePredicate f = [](std::span<const double> x) { return x[0] > 0.0 ? 1 : 0; };
    const Vector rows = draw_rows(g, truth, 30000, rng, f);
    TruncEstConfig cfg;
    const TruncEstResult res = trunc_est_detailed(rows, f, g, cfg, rng);
    const Vector naive = mle_from_moments(g, rows);
    CHECK(dist(res.theta, truth) < 0.15);
    CHECK(dist(res.theta, truth) < dist(naive, truth));
    CHECK(res.candidates.size() + res.failed_chains == res.schedule.n_candidates);
}

TEST_CASE("SGD chain moves toward the truncated MLE") {
    SphericalGaussian g(2, 1.0);
    const Vector truth{0.5, 0.0};
    RngStream rng(12);
    FeaturePredicate f = [](std::span<const double> x) { return x[0] > 0.0 ? 1 : 0; };
    const Vector rows = draw_rows(g, truth, 5000, rng, f);
    TruncEstConfig cfg;
    ResolvedTruncEst r = resolve_trunc_est(cfg, g, 1'000'000);
    const Vector start{1.3, 0.6};
    std::vector<Vector> trace;
    const Vector end = run_sgd_chain(start, rows, f, g, r, true, rng, &trace);
    REQUIRE(trace.size() == 20);
    CHECK(dist(trace.back(), truth) < dist(trace.front(), truth));
    CHECK(dist(end, truth) < 0.2);
    for (const auto& t : trace) CHECK(dist(t, start) <= r.projection_radius + 1e-9);
}

TEST_CASE("MAP oracle") {
    MapOracle o;
    o.family = std::make_shared<SphericalGaussian>(1, 1.0);
    o.params = {Vector{-1.0}, Vector{1.0}};
    CHECK(map_classify(o, Vector{0.0}) == 1);  // exact tie goes to y = 1
    CHECK(map_classify(o, Vector{0.5}) == 1);
    CHECK(map_classify(o, Vector{-0.5}) == 0);
    CHECK(map_score(o, Vector{0.3}) == doctest::Approx(0.6));
    o.weights = {0.3, 0.7};
    CHECK(map_score(o, Vector{0.0}) == doctest::Approx(std::log(7.0 / 3.0)));
    CHECK(map_classify(o, Vector{-0.4}) == 1);
    CHECK(map_classify(o, Vector{-0.5}) == 0);
    o.weights = {0.0, 1.0};
    CHECK_THROWS_AS(o.validate(), DomainError);
}

TEST_CASE("batch MAP labels match the scalar path on every ISA") {
    MapOracle o;
    auto fam = std::make_shared<SphericalGaussian>(5, 4.0);
    o.family = fam;
    o.weights = {0.4, 0.6};
    RngStream rng(21);
    for (auto& p : o.params) {
        p.resize(5);
        for (auto& v : p) v = rng.normal() * 0.3;
    }
    Vector rows(5 * 1001);
    for (auto& v : rows) v = rng.normal() * 2.0;
    std::vector<int> expect(1001), got(1001);
    for (std::size_t i = 0; i < 1001; ++i) expect[i] = map_classify(o, std::span(rows).subspan(5 * i, 5));
    for (auto isa : {simd::Isa::scalar, simd::Isa::avx2, simd::Isa::neon}) {
        if (!simd::isa_available(isa)) continue;
        simd::set_active_isa(isa);
        map_classify_batch(o, rows, got);
        CHECK(got == expect);
    }
    simd::reset_active_isa();
}

TEST_CASE("compute R") {
    const double expect = std::ceil(3430.0 * std::log(12.0 * 2 / 0.01) / (0.3 * 0.01));
    CHECK(double(compute_R(0.3, 0.1, 0.01, 2)) == expect);
    CHECK(double(compute_R(0.3, 0.1, 0.01, 2)) == doctest::Approx(8.899e6).epsilon(1e-3));
    CHECK(compute_R(0.3, 0.1, 0.01, 2, 8.0) < compute_R(0.3, 0.1, 0.01, 2));
    CHECK_THROWS_AS(compute_R(0.0, 0.1, 0.01, 2), DomainError);
}

namespace {

struct MixtureSetup {
    std::shared_ptr<MixtureAuditInstance> instance;
    std::shared_ptr<GroupHalfspaceClassifier> classifier;
    PopulationSummary summary;
};

MixtureSetup mixture_setup(double eps, std::uint64_t seed) {
    MixtureGeneratorConfig cfg;
    cfg.eps = eps;
    RngStream rng(seed);
    RngStream ir = rng.split(0), cr = rng.split(1);
    MixtureSetup s;
    s.instance = std::make_shared<MixtureAuditInstance>(generate_separated_mixture(cfg, ir));
    s.classifier = std::make_shared<GroupHalfspaceClassifier>(
        calibrate_orthogonal_halfspace(*s.instance, Vector{0.5, 0.65}, cr));
    s.summary = population_summary(*s.instance, *s.classifier, MonteCarloMode{200000, seed});
    return s;
}

}  // namespace

TEST_CASE("Exp-Audit passes the calibrated mixture at eps = 0.5") {
    int fair = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const MixtureSetup s = mixture_setup(0.5, seed);
        CHECK(s.summary.eod == doctest::Approx(0.15).epsilon(0.1));
        RngStream cell(seed * 1000);
        RngStream db_rng = cell.split(0);
        const PastDatabase db = generate_past_database(*s.instance, *s.classifier,
                                                       200000, db_rng);
        PartialFeedbackEnv env(s.instance, s.classifier, {0.5, 1.0}, cell.split(1));
        ExpAuditOptions o;
        o.audit.tau_cap = 1000;
        RngStream est = cell.split(2);
        fair += exp_audit(env, db, 0.5, 0.01, s.instance->family_ptr(), o, est).verdict == Verdict::fair;
    }
    CHECK(fair == 5);
}

TEST_CASE("label requests are bounded by the tau' loops and features by R") {
    const MixtureSetup s = mixture_setup(0.25, 77);
    RngStream cell(77);
    RngStream db_rng = cell.split(0);
    const PastDatabase db = generate_past_database(*s.instance, *s.classifier,
                                                   200000, db_rng);
    PartialFeedbackEnv env(s.instance, s.classifier, {0.5, 1.0}, cell.split(1));
    ExpAuditOptions o;
    o.audit.tau_cap = 300;
    o.audit.R_cap = 3000;
    RngStream est = cell.split(2);
    const ExpAuditResult res = exp_audit_detailed(env, db, 0.25, 0.01, s.instance->family_ptr(), o, est);
    REQUIRE_FALSE(res.report.truncated_run);
    const double tp = std::ceil(res.tau_prime);
    // Group-a draws of the tau' loops; only the f = 0 ones pay for a label.
    double loop_draws = 0;
    for (const auto& p : res.params) loop_draws += std::round(tp / p.q_tilde);
    CHECK(double(res.report.labels_requested) <= loop_draws);
    CHECK(double(res.report.labels_requested) >= 0.2 * loop_draws);
    std::uint64_t r_total = 0;
    for (auto r : res.R) r_total += r;
    CHECK(env.ledger().n_feature_requests() <= r_total);
    CHECK(res.R == std::vector<std::uint64_t>{3000, 3000});
    CHECK(res.report.capped);
    CHECK(res.params.size() == 4);
}
