#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "auditlab/audit/blackbox.hpp"
#include "auditlab/audit/exp_audit.hpp"
#include "auditlab/errors.hpp"
#include "auditlab/harness/config.hpp"
#include "auditlab/harness/results.hpp"
#include "auditlab/harness/sweeps.hpp"
#include "auditlab/instances/lower_bound.hpp"
#include "auditlab/instances/mixture.hpp"
#include "auditlab/instances/summary.hpp"
#include "auditlab/io/text.hpp"
#include "auditlab/prob/sampling.hpp"
#include "auditlab/stats/bounds.hpp"

using namespace auditlab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string sig(double v) { return io::format_sig6(v); }

const ResultRow& find_row(const std::vector<ResultRow>& rows, const std::string& alg, double value) {
    for (const auto& r : rows)
        if (r.algorithm == alg && r.sweep_value == value) return r;
    throw DomainError("no row for " + alg + " at " + sig(value));
}

// RS-Audit cost at most 0.75 of Baseline on the synthetic tabular instance.
Outcome cost_gap() {
    const ExperimentConfig c = parse_config(
        Json{{"mode", "blackbox"},
             {"instance", {{"kind", "synthetic_tabular"}, {"n_rows", 5000}, {"group1_prob", 0.7}}},
             {"classifier", {{"kind", "all_LR"}, {"train_size", 500}}},
             {"tau_sweep", {100, 500, 1000}},
             {"cost_pairs", {{0, 1}}},
             {"past_db_size", "auto"}},
        "");
    const SweepOutput out = run_blackbox_sweep(c);
    Outcome o{true, ""};
    for (double tau : c.tau_sweep) {
        const double rs = find_row(out.rows, "RS-Audit", tau).mean_cost;
        const double base = find_row(out.rows, "Baseline", tau).mean_cost;
        o.pass = o.pass && rs <= 0.75 * base;
        o.detail += "tau=" + sig(tau) + " ratio " + sig(rs / base) + "; ";
    }
    return o;
}

// Verdicts on the separated Gaussian mixture.
Outcome mixture_table() {
    const ExperimentConfig c = parse_config(Json{{"mode", "mixture"},
                                                 {"eps_sweep", {0.5, 0.25, 0.1, 0.05}},
                                                 {"cost_pairs", {{0, 1}}},
                                                 {"delta", 0.01},
                                                 {"caps", {{"tau_cap", 1000}, {"R_cap", 20000}}}},
                                            "");
    const SweepOutput out = run_mixture_sweep(c);
    Outcome o{true, ""};
    for (const std::string alg : {"RS-Audit", "Exp-Audit"}) {
        for (double eps : {0.5, 0.1, 0.05}) {
            const ResultRow& r = find_row(out.rows, alg, eps);
            const bool ok = !r.premise_violated && r.correctness_fraction && *r.correctness_fraction == 1.0 &&
                            r.n_seeds == 5;
            o.pass = o.pass && ok;
            if (!ok) o.detail += alg + " eps=" + sig(eps) + " not 5/5; ";
        }
        const ResultRow& mid = find_row(out.rows, alg, 0.25);
        const bool flagged = mid.premise_violated && !mid.correctness_fraction;
        o.pass = o.pass && flagged;
        if (!flagged) o.detail += alg + " eps=0.25 not flagged; ";
    }
    if (o.pass) o.detail = "5/5 at eps 0.5, 0.1, 0.05 for both; eps=0.25 flagged";
    return o;
}

// |delta_hat - Delta| <= eps/2 on the UNFAIR hard instance.
Outcome estimator_guarantee() {
    auto pair = make_lower_bound_pair(0.1, 0.3, 0.3);
    auto inst = std::make_shared<LowerBoundInstance>(pair.second);
    auto clf = inst->classifier();
    const PopulationSummary s = population_summary(*inst, *clf, ExactMode{});
    const double eps = 0.2, delta = 0.1;
    const std::size_t rows = auto_past_db_size(s, compute_tau(eps, delta, 2));
    const int runs = 200;
    std::vector<int> within(runs, 0);
    parallel_for(runs, 0, [&](std::size_t r) {
        RngStream cell(mix_seed(3003, r));
        RngStream db_rng = cell.split(0);
        const PastDatabase db = generate_past_database(*inst, *clf, rows, db_rng);
        PartialFeedbackEnv env(inst, clf, {0.0, 1.0}, cell.split(1));
        within[r] = std::abs(rs_audit(env, db, eps, delta).delta_hat - s.eod) <= eps / 2.0;
    });
    int hits = 0;
    for (int w : within) hits += w;
    const double freq = double(hits) / runs;
    return {freq >= 0.9, "frequency " + sig(freq) + " (Delta = " + sig(s.eod) + ")"};
}

// Empirical negative-binomial tail frequency against 2 exp(-tau eps^2 / 4).
Outcome negbin_oracle() {
    Outcome o{true, ""};
    RngStream root(4004);
    std::size_t cfg = 0;
    for (double p : {0.1, 0.5})
        for (std::uint64_t tau : {500u, 2000u})
            for (double eps : {0.1, 0.2}) {
                RngStream rng = root.split(cfg++);
                const TailBound b = negbin_bounds(tau, p, eps);
                int out = 0;
                const int trials = 2000;
                for (int t = 0; t < trials; ++t) {
                    const double n = double(bernoulli_until_tau_successes(p, tau, rng));
                    out += n < b.lo || n > b.hi;
                }
                const double freq = double(out) / trials;
                const bool ok = freq <= b.failure_prob + 0.01;
                o.pass = o.pass && ok;
                if (!ok || freq > 0.5 * b.failure_prob)
                    o.detail += "(" + sig(p) + "," + std::to_string(tau) + "," + sig(eps) + ") " + sig(freq) +
                                " vs " + sig(b.failure_prob) + "; ";
            }
    if (o.detail.empty()) o.detail = "all 8 configurations well inside the bound";
    return o;
}

// Exact EOD on random valid hard instances and the label-count slope.
Outcome lower_bound_checks() {
    RngStream rng(5005);
    int checked = 0, attempts = 0;
    bool exact = true;
    while (checked < 10 && attempts < 10000) {
        ++attempts;
        const Rational eps(1 + static_cast<long>(rng.index(24)), 100);
        const Rational p(1 + static_cast<long>(rng.index(49)), 100);
        const Rational q(1 + static_cast<long>(rng.index(49)), 100);
        try {
            auto [fair, unfair] = make_lower_bound_pair(eps, p, q);
            exact = exact && fair.exact_eod() == 0 && unfair.exact_eod() == 2 * eps / (1 + 4 * eps);
            ++checked;
        } catch (const DomainError&) {
        }
    }
    const ExperimentConfig c = parse_config(Json{{"mode", "lower_bound_check"},
                                                 {"lower_bound",
                                                  {{"cases", Json::array()},
                                                   {"slope_eps", {0.2, 0.1, 0.05}},
                                                   {"slope_p", "0.3"},
                                                   {"slope_q", "0.3"},
                                                   {"runs", 2}}}},
                                            "");
    const LowerBoundReport r = run_lower_bound_check(c);
    const double slope = r.slope.value_or(NAN);
    return {exact && checked == 10 && r.slope_in_range,
            std::to_string(checked) + " random instances " + (exact ? "exact" : "NOT exact") + "; slope " +
                sig(slope)};
}

// TruncEst on a standard Gaussian cut through its mean.
Outcome trunc_est_recovery() {
    SphericalGaussian g(2, 1.0);
    FeaturePredicate f = [](std::span<const double> x) { return x[0] >= 0.0 ? 1 : 0; };
    const Vector truth{0.0, 0.0};
    int improved = 0;
    bool within = true;
    std::string errs;
    for (std::uint64_t s = 1; s <= 5; ++s) {
        RngStream rng(mix_seed(6006, s));
        Vector rows;
        Vector x(2);
        while (rows.size() < 2 * 50000) {
            g.sample_into(truth, rng, x);
            if (f(x)) rows.insert(rows.end(), x.begin(), x.end());
        }
        TruncEstConfig cfg;
        RngStream big_rng = rng.split(1), small_rng = rng.split(2);
        const double big = distance(trunc_est(rows, f, g, cfg, big_rng), truth);
        const double small =
            distance(trunc_est(std::span<const double>(rows).first(2 * 5000), f, g, cfg, small_rng), truth);
        within = within && big <= 0.15;
        improved += big <= small;
        errs += sig(big) + "/" + sig(small) + " ";
    }
    return {within && improved >= 4, "error 5e4/5e3 per seed: " + errs};
}

// MAP misclassification with true parameters at the separation radius.
Outcome map_oracle() {
    MixtureGeneratorConfig cfg;
    RngStream rng(7007);
    RngStream gen = rng.split(0);
    const MixtureAuditInstance m = generate_separated_mixture(cfg, gen);
    Outcome o{true, ""};
    const int n = 100000;
    for (std::size_t a = 0; a < 2; ++a) {
        MapOracle oracle;
        oracle.group = static_cast<int>(a);
        oracle.family = m.family_ptr();
        const double q1 = m.label_probs()[a];
        oracle.weights = {1.0 - q1, q1};
        oracle.params = {m.theta(0, a), m.theta(1, a)};
        const double qm = std::min(q1, 1.0 - q1);
        const double bound = cfg.eps * qm / 36.0;
        const double limit = bound + 3.0 * std::sqrt(bound * (1.0 - bound) / n);
        for (int y = 0; y < 2; ++y) {
            RngStream draws = rng.split(1 + 2 * a + y);
            Vector x(m.point_dim());
            int wrong = 0;
            for (int i = 0; i < n; ++i) {
                m.family().sample_into(m.theta(y, a), draws, x);
                wrong += map_classify(oracle, x) != y;
            }
            const double rate = double(wrong) / n;
            o.pass = o.pass && rate <= limit;
            o.detail += "(a=" + std::to_string(a) + ",y=" + std::to_string(y) + ") " + sig(rate) + " <= " +
                        sig(limit) + "; ";
        }
    }
    return o;
}

// Exp-Audit label cost flat in eps while RS-Audit grows.
Outcome exp_cost_flat() {
    const ExperimentConfig c = parse_config(Json{{"mode", "mixture"},
                                                 {"eps_sweep", {0.5, 0.1, 0.05}},
                                                 {"cost_pairs", {{0, 1}}},
                                                 {"delta", 0.25},
                                                 {"past_db_size", "auto"},
                                                 {"caps", {{"tau_cap", 100000}, {"R_cap", 100000}}}},
                                            "");
    const SweepOutput out = run_mixture_sweep(c);
    double exp_lo = INFINITY, exp_hi = 0, rs_lo = INFINITY, rs_hi = 0;
    for (const auto& r : out.rows) {
        if (r.algorithm == "Exp-Audit") {
            exp_lo = std::min(exp_lo, r.mean_label_cost);
            exp_hi = std::max(exp_hi, r.mean_label_cost);
        } else {
            rs_lo = std::min(rs_lo, r.mean_cost);
            rs_hi = std::max(rs_hi, r.mean_cost);
        }
    }
    const double exp_ratio = exp_hi / exp_lo, rs_ratio = rs_hi / rs_lo;
    return {exp_ratio <= 3.0 && rs_ratio >= 10.0,
            "Exp-Audit label cost max/min " + sig(exp_ratio) + ", RS-Audit cost max/min " + sig(rs_ratio)};
}

std::string csv_of(const std::vector<ResultRow>& rows) {
    std::ostringstream s;
    write_results_csv(s, rows);
    return s.str();
}

// Byte-identical results across runs and thread counts, and against the fixture.
Outcome determinism(const std::string& fixture_dir) {
    ExperimentConfig c = parse_config(
        Json{{"mode", "blackbox"}, {"cost_pairs", {{0, 1}}}, {"past_db_size", 100000}, {"threads", 1}}, "");
    const std::string first = csv_of(run_blackbox_sweep(c).rows);
    c.threads = 0;
    const std::string second = csv_of(run_blackbox_sweep(c).rows);
    std::ifstream in(fixture_dir + "/results_blackbox.csv", std::ios::binary);
    const std::string fixture((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    const ExperimentConfig m = parse_config(
        Json{{"mode", "mixture"}, {"eps_sweep", {0.5, 0.1}}, {"seeds", {1, 2}}, {"delta", 0.01}}, "");
    const std::string m1 = csv_of(run_mixture_sweep(m).rows), m2 = csv_of(run_mixture_sweep(m).rows);
    const bool ok = first == second && first == fixture && m1 == m2;
    return {ok, std::string("blackbox reruns ") + (first == second ? "identical" : "DIFFER") + ", fixture " +
                    (first == fixture ? "identical" : "DIFFERS") + ", mixture reruns " +
                    (m1 == m2 ? "identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::string fixtures = argc > 1 ? argv[1] : AUDITLAB_FIXTURE_DIR;
    struct Criterion {
        int id;
        const char* name;
        double limit_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all{
        {1, "cost gap", 120, cost_gap},
        {2, "mixture verdicts", 600, mixture_table},
        {3, "estimator guarantee", 300, estimator_guarantee},
        {4, "negative-binomial oracle", 60, negbin_oracle},
        {5, "lower-bound instances", 180, lower_bound_checks},
        {6, "TruncEst recovery", 180, trunc_est_recovery},
        {7, "MAP oracle", 60, map_oracle},
        {8, "Exp-Audit flat label cost", 600, exp_cost_flat},
        {9, "determinism", 0, [&] { return determinism(fixtures); }},
    };
    int failed = 0;
    for (const auto& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_s > 0 && secs > c.limit_s) {
            o.pass = false;
            o.detail += " over the " + sig(c.limit_s) + " s budget";
        }
        failed += !o.pass;
        std::printf("AC%d %s  %s (%.1f s): %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
