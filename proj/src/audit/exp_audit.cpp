#include "auditlab/audit/exp_audit.hpp"

#include <cmath>
#include <limits>

#include "auditlab/errors.hpp"
#include "auditlab/simd/kernels.hpp"

namespace auditlab {

void MapOracle::validate() const {
    if (!family) throw DomainError("MAP oracle needs a family");
    for (int y = 0; y < 2; ++y) {
        if (!(weights[y] > 0.0)) throw DomainError("MAP weights must be positive");
        if (params[y].size() != family->dim()) throw DomainError("MAP parameter dimension mismatch");
    }
}

double map_score(const MapOracle& oracle, std::span<const double> x) {
    const ExpFamily& fam = *oracle.family;
    Vector t = fam.suff_stat(x);
    double s = std::log(oracle.weights[1]) - std::log(oracle.weights[0]) -
               fam.log_partition(oracle.params[1]) + fam.log_partition(oracle.params[0]);
    for (std::size_t j = 0; j < t.size(); ++j) s += (oracle.params[1][j] - oracle.params[0][j]) * t[j];
    return s;
}

int map_classify(const MapOracle& oracle, std::span<const double> x) {
    return map_score(oracle, x) >= -kMapTieBand ? 1 : 0;
}

void map_classify_batch(const MapOracle& oracle, std::span<const double> rows, std::span<int> out) {
    const ExpFamily& fam = *oracle.family;
    const std::size_t pd = fam.point_dim();
    if (rows.size() != out.size() * pd) throw DomainError("batch size mismatch");
    if (!fam.identity_suff_stat()) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = map_classify(oracle, rows.subspan(i * pd, pd));
        return;
    }
    Vector w(pd);
    for (std::size_t j = 0; j < pd; ++j) w[j] = oracle.params[1][j] - oracle.params[0][j];
    const double bias = std::log(oracle.weights[1]) - std::log(oracle.weights[0]) -
                        fam.log_partition(oracle.params[1]) + fam.log_partition(oracle.params[0]);
    Vector scores(out.size());
    simd::affine_scores(rows, pd, w, bias, scores);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = scores[i] >= -kMapTieBand ? 1 : 0;
}

std::uint64_t compute_R(double q_tilde_min, double eps, double delta, std::size_t n_groups,
                        double log_constant) {
    if (!(q_tilde_min > 0.0 && q_tilde_min <= 1.0)) throw DomainError("q_tilde_min must be in (0, 1]");
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must be in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must be in (0, 1)");
    if (n_groups < 1 || !(log_constant > 0.0)) throw DomainError("invalid R log argument");
    double r = std::ceil(3430.0 * std::log(log_constant * static_cast<double>(n_groups) / delta) /
                         (q_tilde_min * eps * eps));
    if (r >= 1.8e19) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(std::max(1.0, r));
}

ExpAuditResult exp_audit_detailed(PartialFeedbackEnv& env, const PastDatabase& db, double eps,
                                  double delta, std::shared_ptr<const ExpFamily> family,
                                  const ExpAuditOptions& options, RngStream& rng) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must be in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must be in (0, 1)");
    if (!(options.eps_prime > 0.0 && options.eps_prime < 1.0))
        throw DomainError("eps_prime must be in (0, 1)");
    if (!family) throw DomainError("family required");
    if (family->point_dim() != db.dim()) throw DomainError("family and database dimensions differ");

    const AuditOptions& ao = options.audit;
    const std::size_t k = env.n_groups();
    const double log_arg = std::log(14.0 * static_cast<double>(k) / delta);

    ExpAuditResult out;
    AuditReport& r = out.report;
    r.algorithm = "Exp-Audit";
    r.seed = ao.seed;
    r.estimates.conditioning = Conditioning::per_group;
    for (int y = 0; y < 2; ++y) {
        r.estimates.p_hat[y].assign(k, 0.0);
        r.estimates.q_hat[y].assign(k, 0.0);
    }

    double tau = ao.tau_override ? *ao.tau_override : 576.0 * log_arg / (eps * eps);
    double tau_prime = 4.0 * log_arg / (options.eps_prime * options.eps_prime);
    if (ao.tau_cap) {
        if (tau > *ao.tau_cap) tau = *ao.tau_cap, r.capped = true;
        if (tau_prime > *ao.tau_cap) tau_prime = *ao.tau_cap, r.capped = true;
    }
    if (!(tau >= 1.0 && tau_prime >= 1.0)) throw DomainError("tau must be at least 1");
    r.tau_used = tau;
    out.tau_prime = tau_prime;
    const auto tau_n = static_cast<std::uint64_t>(std::ceil(tau));
    const auto tau_prime_n = static_cast<std::uint64_t>(std::ceil(tau_prime));

    TruncEstConfig tcfg = options.trunc;
    tcfg.eps_target = eps / (2.0 * family->constants().ball_beta);
    tcfg.delta = delta / (14.0 * static_cast<double>(k));

    const std::size_t pd = family->point_dim();
    Vector xbuf(pd);
    std::vector<int> proxy;
    for (std::size_t ai = 0; ai < k; ++ai) {
        const int a = static_cast<int>(ai);
        const Classifier& clf = env.classifier();
        FeaturePredicate f = [&clf, a](std::span<const double> x) { return clf.predict(x, a); };

        MapOracle oracle;
        oracle.group = a;
        oracle.family = family;
        for (int y = 0; y < 2; ++y) {
            Vector cell = db.positive_cell(y, a);
            RngStream cell_rng = rng.split(2 * ai + static_cast<std::size_t>(y));
            TruncEstResult est;
            try {
                est = trunc_est_detailed(cell, f, *family, tcfg, cell_rng);
            } catch (const InsufficientSamples& e) {
                throw InsufficientHistory(std::string("cell (y=") + std::to_string(y) +
                                          ", a=" + std::to_string(a) + "): " + e.what());
            }
            out.trunc_retried = out.trunc_retried || est.retried;
            out.majority_fallback = out.majority_fallback || !est.majority_found;
            out.failed_chains += est.failed_chains;
            oracle.params[y] = est.theta;

            OnlineCount c = online_sample_capped(env, tau_prime_n, y, a, ao.draw_cap);
            r.truncated_run = r.truncated_run || c.truncated;
            double q_tilde = c.truncated
                                 ? (c.n == 0 ? 1.0
                                             : static_cast<double>(std::max<std::uint64_t>(c.hits, 1)) /
                                                   static_cast<double>(c.n))
                                 : static_cast<double>(tau_prime_n) / static_cast<double>(c.n);
            oracle.weights[y] = q_tilde;

            std::uint64_t np = past_sample(db, tau_n, y, a, Conditioning::per_group);
            r.estimates.p_hat[y][ai] = static_cast<double>(tau_n) / static_cast<double>(np);
        }

        const double q_m = std::min(oracle.weights[0], oracle.weights[1]);
        std::uint64_t R = compute_R(std::min(q_m, 1.0), eps, delta, k, options.R_log_constant);
        if (ao.R_cap && R > *ao.R_cap) {
            R = *ao.R_cap;
            r.capped = true;
        }
        out.R.push_back(R);

        // Feature-only phase: collect R group-a individuals, then label them by MAP.
        Vector rows;
        rows.reserve(static_cast<std::size_t>(R) * pd);
        std::uint64_t drawn = 0, got = 0;
        while (got < R) {
            if (drawn >= ao.draw_cap) {
                r.truncated_run = true;
                break;
            }
            Individual ind = env.draw_individual();
            ++drawn;
            if (ind.group() != a) continue;
            auto x = ind.feature_visible() ? ind.features() : env.reveal_feature(ind);
            rows.insert(rows.end(), x.begin(), x.end());
            ++got;
        }
        proxy.assign(static_cast<std::size_t>(got), 0);
        map_classify_batch(oracle, rows, proxy);
        std::uint64_t r1 = 0;
        for (int v : proxy) r1 += static_cast<std::uint64_t>(v);
        const std::uint64_t counts[2] = {got - r1, r1};
        for (int y = 0; y < 2; ++y) {
            // An empty proxy class counts as one hit so the ratio stays finite.
            double q_hat = got == 0 ? 1.0
                                    : static_cast<double>(std::max<std::uint64_t>(counts[y], 1)) /
                                          static_cast<double>(got);
            r.estimates.q_hat[y][ai] = q_hat;
            out.params.push_back({a, y, oracle.params[y], oracle.weights[y], q_hat,
                                  r.estimates.p_hat[y][ai]});
        }
    }

    r.delta_hat = estimate_eod(r.estimates);
    r.verdict = decide(r.delta_hat, eps);
    r.samples_drawn = env.ledger().n_drawn();
    r.labels_requested = env.ledger().n_label_requests();
    r.cost = env.ledger().total_cost();
    r.label_cost = env.ledger().label_cost();
    return out;
}

AuditReport exp_audit(PartialFeedbackEnv& env, const PastDatabase& db, double eps, double delta,
                      std::shared_ptr<const ExpFamily> family, const ExpAuditOptions& options,
                      RngStream& rng) {
    return exp_audit_detailed(env, db, eps, delta, std::move(family), options, rng).report;
}

}  // namespace auditlab
