#include "auditlab/audit/blackbox.hpp"

#include <cmath>
#include <limits>

#include "auditlab/errors.hpp"

namespace auditlab {

const char* verdict_name(Verdict v) { return v == Verdict::fair ? "FAIR" : "UNFAIR"; }

double compute_tau(double eps, double delta, std::size_t n_groups) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must be in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must be in (0, 1)");
    if (n_groups < 2) throw DomainError("at least two groups required");
    return 576.0 * std::log(8.0 * static_cast<double>(n_groups) / delta) / (eps * eps);
}

Verdict decide(double delta_hat, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must be in (0, 1)");
    return delta_hat > eps / 2.0 ? Verdict::unfair : Verdict::fair;
}

double estimate_eod(const CellEstimates& est) {
    double best = 0.0;
    const std::size_t k = est.q_hat[0].size();
    for (int y = 0; y < 2; ++y)
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a + 1; b < k; ++b) {
                double ra = est.p_hat[y][a] / est.q_hat[y][a];
                double rb = est.p_hat[y][b] / est.q_hat[y][b];
                best = std::max(best, std::abs(ra - rb));
            }
    return best;
}

OnlineCount online_sample_capped(PartialFeedbackEnv& env, std::uint64_t tau, int y, int a,
                                 std::uint64_t draw_cap) {
    if (tau == 0) throw DomainError("tau must be at least 1");
    OnlineCount c;
    std::uint64_t drawn = 0;
    while (c.hits < tau) {
        if (drawn >= draw_cap) {
            c.truncated = true;
            break;
        }
        Individual ind = env.draw_individual();
        ++drawn;
        if (ind.group() != a) continue;
        ++c.n;
        int label = ind.decision() == 1 ? ind.label() : env.reveal_label(ind);
        if (label == y) ++c.hits;
    }
    return c;
}

std::uint64_t online_sample(PartialFeedbackEnv& env, std::uint64_t tau, int y, int a) {
    return online_sample_capped(env, tau, y, a, std::numeric_limits<std::uint64_t>::max()).n;
}

std::uint64_t past_sample(const PastDatabase& db, std::uint64_t tau, int y, int a,
                          Conditioning conditioning) {
    if (tau == 0) throw DomainError("tau must be at least 1");
    std::uint64_t n = 0, hits = 0;
    for (std::size_t i = 0; i < db.size(); ++i) {
        const bool in_group = db.group(i) == a;
        if (conditioning == Conditioning::per_group && !in_group) continue;
        ++n;
        if (in_group && db.decision(i) == 1 && *db.label(i) == y && ++hits == tau) return n;
    }
    throw InsufficientHistory("past database ran out before tau hits for (y=" + std::to_string(y) +
                              ", a=" + std::to_string(a) + ")");
}

namespace {

struct TauChoice {
    std::uint64_t count;
    double used;
    bool capped;
};

TauChoice choose_tau(double formula, const AuditOptions& opt) {
    double t = opt.tau_override ? *opt.tau_override : formula;
    if (!(t >= 1.0)) throw DomainError("tau must be at least 1");
    bool capped = false;
    if (opt.tau_cap && t > *opt.tau_cap) {
        t = *opt.tau_cap;
        capped = true;
    }
    return {static_cast<std::uint64_t>(std::ceil(t)), t, capped};
}

// Truncated loops fall back to hits/n, with at least one hit.
double ratio_estimate(std::uint64_t tau, const OnlineCount& c) {
    if (!c.truncated) return static_cast<double>(tau) / static_cast<double>(c.n);
    if (c.n == 0) return 1.0;
    return static_cast<double>(std::max<std::uint64_t>(c.hits, 1)) / static_cast<double>(c.n);
}

void finish(AuditReport& r, const PartialFeedbackEnv& env, double eps) {
    r.delta_hat = estimate_eod(r.estimates);
    r.verdict = decide(r.delta_hat, eps);
    r.samples_drawn = env.ledger().n_drawn();
    r.labels_requested = env.ledger().n_label_requests();
    r.cost = env.ledger().total_cost();
    r.label_cost = env.ledger().label_cost();
}

void init_estimates(CellEstimates& e, Conditioning c, std::size_t k) {
    e.conditioning = c;
    for (int y = 0; y < 2; ++y) {
        e.p_hat[y].assign(k, 0.0);
        e.q_hat[y].assign(k, 0.0);
    }
}

}  // namespace

AuditReport baseline_audit(PartialFeedbackEnv& env, const PastDatabase& db, double eps,
                           double delta, const AuditOptions& options) {
    const std::size_t k = env.n_groups();
    TauChoice tau = choose_tau(compute_tau(eps, delta, k), options);
    AuditReport r;
    r.algorithm = "Baseline";
    r.tau_used = tau.used;
    r.capped = tau.capped;
    r.seed = options.seed;
    init_estimates(r.estimates, Conditioning::joint, k);

    for (int y = 0; y < 2; ++y) {
        for (std::size_t ai = 0; ai < k; ++ai) {
            const int a = static_cast<int>(ai);
            OnlineCount c;
            std::uint64_t drawn = 0;
            while (c.hits < tau.count) {
                if (drawn >= options.draw_cap) {
                    c.truncated = true;
                    break;
                }
                Individual ind = env.draw_individual();
                ++drawn;
                ++c.n;
                int label = ind.decision() == 1 ? ind.label() : env.reveal_label(ind);
                if (ind.group() == a && label == y) ++c.hits;
            }
            r.truncated_run = r.truncated_run || c.truncated;
            r.estimates.q_hat[y][ai] = ratio_estimate(tau.count, c);
            std::uint64_t np = past_sample(db, tau.count, y, a, Conditioning::joint);
            r.estimates.p_hat[y][ai] = static_cast<double>(tau.count) / static_cast<double>(np);
        }
    }
    finish(r, env, eps);
    return r;
}

AuditReport rs_audit(PartialFeedbackEnv& env, const PastDatabase& db, double eps, double delta,
                     const AuditOptions& options) {
    const std::size_t k = env.n_groups();
    TauChoice tau = choose_tau(compute_tau(eps, delta, k), options);
    AuditReport r;
    r.algorithm = "RS-Audit";
    r.tau_used = tau.used;
    r.capped = tau.capped;
    r.seed = options.seed;
    init_estimates(r.estimates, Conditioning::per_group, k);

    for (int y = 0; y < 2; ++y) {
        for (std::size_t ai = 0; ai < k; ++ai) {
            const int a = static_cast<int>(ai);
            OnlineCount c = online_sample_capped(env, tau.count, y, a, options.draw_cap);
            r.truncated_run = r.truncated_run || c.truncated;
            r.estimates.q_hat[y][ai] = ratio_estimate(tau.count, c);
            std::uint64_t np = past_sample(db, tau.count, y, a, Conditioning::per_group);
            r.estimates.p_hat[y][ai] = static_cast<double>(tau.count) / static_cast<double>(np);
        }
    }
    finish(r, env, eps);
    return r;
}

}  // namespace auditlab
