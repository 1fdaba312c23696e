#include "auditlab/harness/sweeps.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "auditlab/audit/exp_audit.hpp"
#include "auditlab/errors.hpp"
#include "auditlab/io/text.hpp"

namespace auditlab {

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::size_t auto_past_db_size(const PopulationSummary& s, double tau) {
    double min_cell = 1.0;
    for (int y = 0; y < 2; ++y)
        for (double p : s.p_joint[y]) min_cell = std::min(min_cell, p);
    if (!(min_cell > 0.0)) throw IllPosed("a positively classified cell has zero mass");
    const double rows = std::ceil(1.25 * std::ceil(tau) / min_cell) + 1000.0;
    if (rows > 5e7)
        throw DomainError("past database would need " + io::format_sig6(rows) + " rows; set a tau cap");
    return static_cast<std::size_t>(rows);
}

PopulationSummary best_summary(const AuditInstance& instance, const Classifier& classifier,
                               std::uint64_t seed) {
    try {
        return population_summary(instance, classifier, ExactMode{});
    } catch (const DomainError&) {
        return population_summary(instance, classifier, MonteCarloMode{1'000'000, seed});
    }
}

namespace {

constexpr std::uint64_t kInstanceSalt = 0x1157a11ceULL;

// Positives per cell for the TruncEst warm start plus 100 SGD steps per chain.
double trunc_est_cell_target(const TruncEstConfig& t, double delta, std::size_t k) {
    const double d = delta / (14.0 * static_cast<double>(k));
    const std::size_t candidates =
        t.n_candidates ? *t.n_candidates
                       : std::max<std::size_t>(10, 10 * static_cast<std::size_t>(std::ceil(std::log(1.0 / d))));
    return static_cast<double>(t.n_init + candidates * std::max<std::size_t>(t.min_steps, 100));
}

struct Built {
    std::shared_ptr<const AuditInstance> instance;
    std::shared_ptr<const Classifier> classifier;
};

Built build(const ExperimentConfig& c, const Json& instance_doc, std::uint64_t seed) {
    RngStream rng(mix_seed(seed, kInstanceSalt));
    RngStream inst_rng = rng.split(0), clf_rng = rng.split(1);
    Built b;
    b.instance = instance_from_json(instance_doc, c.base_dir, inst_rng);
    b.classifier = classifier_from_json(c.classifier, *b.instance, clf_rng);
    return b;
}

AuditOptions base_options(const ExperimentConfig& c, std::uint64_t seed) {
    AuditOptions o;
    o.tau_cap = c.caps.tau_cap;
    o.R_cap = c.caps.R_cap;
    o.draw_cap = c.caps.draw_cap;
    o.seed = seed;
    return o;
}

}  // namespace

SweepOutput run_blackbox_sweep(const ExperimentConfig& c) {
    if (c.mode != ExperimentMode::blackbox) throw ConfigError("config mode is not blackbox");
    const std::uint64_t root = c.instance_seed + c.seed_offset;
    Built b = build(c, c.instance, root);
    const PopulationSummary summary = best_summary(*b.instance, *b.classifier, mix_seed(root, 7));

    const double tau_max = *std::max_element(c.tau_sweep.begin(), c.tau_sweep.end());
    const double tau_needed = c.caps.tau_cap ? std::min(tau_max, *c.caps.tau_cap) : tau_max;
    const std::size_t db_rows = c.past_db_size ? *c.past_db_size : auto_past_db_size(summary, tau_needed);

    const std::size_t n_tau = c.tau_sweep.size(), n_seed = c.seeds.size();
    std::vector<std::array<RunRecord, 2>> cells(n_tau * n_seed);
    parallel_for(cells.size(), c.threads, [&](std::size_t idx) {
        const std::size_t i = idx / n_seed, s = idx % n_seed;
        const std::uint64_t seed = c.seeds[s];
        RngStream cell(mix_seed(seed + c.seed_offset, i));
        AuditOptions o = base_options(c, seed);
        o.tau_override = c.tau_sweep[i];
        RngStream db_rng = cell.split(2);
        const PastDatabase db = generate_past_database(*b.instance, *b.classifier, db_rows, db_rng);
        for (int alg = 0; alg < 2; ++alg) {
            PartialFeedbackEnv env(b.instance, b.classifier, c.cost_pairs.front(),
                                   cell.split(static_cast<std::uint64_t>(alg)));
            AuditReport r = alg == 0 ? baseline_audit(env, db, 0.5, c.delta, o) : rs_audit(env, db, 0.5, c.delta, o);
            cells[idx][static_cast<std::size_t>(alg)] =
                record_from_report(r, env.ledger(), c.tau_sweep[i], summary.eod);
        }
    });

    SweepOutput out;
    for (const auto& pair : cells)
        for (const auto& r : pair) out.records.push_back(r);
    out.rows = aggregate(out.records, c.cost_pairs, false);
    out.notes.push_back("past database rows: " + std::to_string(db_rows));
    out.notes.push_back("true eod: " + io::format_sig6(summary.eod));
    return out;
}

SweepOutput run_mixture_sweep(const ExperimentConfig& c) {
    if (c.mode != ExperimentMode::mixture) throw ConfigError("config mode is not mixture");
    Json instance_doc = c.instance;
    if (instance_doc["kind"] == "generated_mixture" && !instance_doc.contains("eps"))
        instance_doc["eps"] = *std::min_element(c.eps_sweep.begin(), c.eps_sweep.end());

    const std::size_t n_eps = c.eps_sweep.size(), n_seed = c.seeds.size();
    std::vector<std::array<RunRecord, 2>> cells(n_eps * n_seed);
    std::vector<std::size_t> db_sizes(cells.size());
    parallel_for(cells.size(), c.threads, [&](std::size_t idx) {
        const std::size_t i = idx / n_seed, s = idx % n_seed;
        const std::uint64_t seed = c.seeds[s];
        const double eps = c.eps_sweep[i];
        Built b = build(c, instance_doc, seed + c.seed_offset);
        auto mixture = std::dynamic_pointer_cast<const MixtureAuditInstance>(b.instance);
        if (!mixture) throw ConfigError("mixture sweep needs a mixture instance");
        const PopulationSummary summary = best_summary(*b.instance, *b.classifier, mix_seed(seed, 7));

        RngStream cell(mix_seed(seed + c.seed_offset, i));
        const std::size_t k = b.instance->n_groups();
        double tau_rs = compute_tau(eps, c.delta, k);
        double tau_exp = 576.0 * std::log(14.0 * static_cast<double>(k) / c.delta) / (eps * eps);
        if (c.caps.tau_cap) {
            tau_rs = std::min(tau_rs, *c.caps.tau_cap);
            tau_exp = std::min(tau_exp, *c.caps.tau_cap);
        }
        const std::size_t db_rows =
            c.past_db_size ? *c.past_db_size
                           : auto_past_db_size(summary, std::max({tau_rs, tau_exp, trunc_est_cell_target(c.trunc, c.delta, k)}));
        db_sizes[idx] = db_rows;
        RngStream db_rng = cell.split(0);
        const PastDatabase db = generate_past_database(*b.instance, *b.classifier, db_rows, db_rng);

        const AuditOptions o = base_options(c, seed);
        {
            PartialFeedbackEnv env(b.instance, b.classifier, c.cost_pairs.front(), cell.split(1));
            AuditReport r = rs_audit(env, db, eps, c.delta, o);
            cells[idx][0] = record_from_report(r, env.ledger(), eps, summary.eod);
        }
        {
            PartialFeedbackEnv env(b.instance, b.classifier, c.cost_pairs.front(), cell.split(2));
            ExpAuditOptions eo;
            eo.audit = o;
            eo.eps_prime = c.eps_prime;
            eo.R_log_constant = c.R_log_constant;
            eo.trunc = c.trunc;
            RngStream est_rng = cell.split(3);
            AuditReport r = exp_audit(env, db, eps, c.delta, mixture->family_ptr(), eo, est_rng);
            cells[idx][1] = record_from_report(r, env.ledger(), eps, summary.eod);
        }
    });

    SweepOutput out;
    for (const auto& pair : cells)
        for (const auto& r : pair) out.records.push_back(r);
    out.rows = aggregate(out.records, c.cost_pairs, true);
    for (const auto& row : out.rows)
        if (row.premise_violated && row.cost_pair == c.cost_pairs.front())
            out.notes.push_back(row.algorithm + " eps=" + io::format_sig6(row.sweep_value) +
                                ": premise violated (eps/2 <= eod <= eps), not scored");
    out.notes.push_back("past database rows (max): " +
                        std::to_string(*std::max_element(db_sizes.begin(), db_sizes.end())));
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("slope needs two or more points");
    double mx = 0, my = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) throw DomainError("log-log slope needs positive values");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0) throw DomainError("slope needs distinct x values");
    return sxy / sxx;
}

LowerBoundReport run_lower_bound_check(const ExperimentConfig& c) {
    if (c.mode != ExperimentMode::lower_bound_check) throw ConfigError("config mode is not lower_bound_check");
    const LowerBoundConfig& lb = c.lower_bound;
    const Rational g1 = parse_rational(lb.group1_prob);
    LowerBoundReport report;
    for (const auto& cs : lb.cases) {
        const Rational eps = parse_rational(cs.eps);
        auto [fair, unfair] = make_lower_bound_pair(eps, parse_rational(cs.p), parse_rational(cs.q), g1);
        const Rational expected = 2 * eps / (1 + 4 * eps);
        LowerBoundCaseResult r;
        r.input = cs;
        r.fair_eod = rational_to_string(fair.exact_eod());
        r.unfair_eod = rational_to_string(unfair.exact_eod());
        r.expected_unfair_eod = rational_to_string(expected);
        r.fair_exact = fair.exact_eod() == 0;
        r.unfair_exact = unfair.exact_eod() == expected;
        report.cases.push_back(std::move(r));
    }

    const std::size_t n_eps = lb.slope_eps.size(), runs = lb.runs;
    const Hypothesis hyps[2] = {Hypothesis::unfair, Hypothesis::fair};
    std::vector<RunRecord> records(2 * n_eps * runs);
    parallel_for(records.size(), c.threads, [&](std::size_t idx) {
        const std::size_t h = idx / (n_eps * runs), i = idx / runs % n_eps, s = idx % runs;
        const double eps = lb.slope_eps[i];
        const std::uint64_t seed = c.seeds[s];
        auto inst = std::make_shared<LowerBoundInstance>(parse_rational(io::format_exact(eps)),
                                                         parse_rational(lb.slope_p), parse_rational(lb.slope_q),
                                                         hyps[h], g1);
        auto clf = inst->classifier();
        const PopulationSummary summary = population_summary(*inst, *clf, ExactMode{});
        // The slope needs the uncapped tau, so the tau cap is not applied here.
        const double tau = compute_tau(eps, c.delta, 2);
        RngStream cell(mix_seed(seed + c.seed_offset, i));
        RngStream db_rng = cell.split(2 * h);
        const PastDatabase db = generate_past_database(*inst, *clf, auto_past_db_size(summary, tau), db_rng);
        PartialFeedbackEnv env(inst, clf, c.cost_pairs.front(), cell.split(2 * h + 1));
        AuditOptions o;
        o.draw_cap = c.caps.draw_cap;
        o.seed = seed;
        AuditReport r = rs_audit(env, db, eps, c.delta, o);
        r.algorithm += h == 0 ? " (UNFAIR)" : " (FAIR)";
        records[idx] = record_from_report(r, env.ledger(), eps, summary.eod);
    });

    for (std::size_t h = 0; h < 2; ++h) {
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < n_eps; ++i) {
            SlopePoint pt;
            pt.hypothesis = hyps[h];
            pt.eps = lb.slope_eps[i];
            for (std::size_t s = 0; s < runs; ++s)
                pt.labels.push_back(static_cast<double>(records[(h * n_eps + i) * runs + s].n_label_requests));
            pt.mean_labels = mean_std(pt.labels).mean;
            xs.push_back(1.0 / (pt.eps * pt.eps));
            ys.push_back(pt.mean_labels);
            report.slope_points.push_back(std::move(pt));
        }
        if (n_eps < 2) continue;
        const double slope = loglog_slope(xs, ys);
        if (h == 0) {
            report.slope = slope;
            report.slope_in_range = slope >= 0.8 && slope <= 1.2;
        } else {
            report.fair_slope = slope;
        }
    }
    if (!records.empty()) report.rows = aggregate(records, c.cost_pairs, true);
    return report;
}

Json lower_bound_report_to_json(const LowerBoundReport& r) {
    Json cases = Json::array();
    for (const auto& cs : r.cases)
        cases.push_back(Json{{"eps", cs.input.eps},
                             {"p", cs.input.p},
                             {"q", cs.input.q},
                             {"fair_eod", cs.fair_eod},
                             {"unfair_eod", cs.unfair_eod},
                             {"expected_unfair_eod", cs.expected_unfair_eod},
                             {"fair_exact", cs.fair_exact},
                             {"unfair_exact", cs.unfair_exact}});
    Json points = Json::array();
    for (const auto& p : r.slope_points)
        points.push_back(Json{{"hypothesis", hypothesis_name(p.hypothesis)},
                              {"eps", p.eps},
                              {"labels", p.labels},
                              {"mean_labels", p.mean_labels}});
    Json doc{{"cases", cases}, {"slope_points", points}, {"slope_in_range", r.slope_in_range}};
    doc["slope"] = r.slope ? Json(*r.slope) : Json(nullptr);
    doc["fair_slope"] = r.fair_slope ? Json(*r.fair_slope) : Json(nullptr);
    return doc;
}

}  // namespace auditlab
