#include "auditlab/audit/trunc_est.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "auditlab/errors.hpp"

namespace auditlab {

namespace {

std::size_t to_count(double v) {
    if (!std::isfinite(v) || v >= 1e18) return static_cast<std::size_t>(1e18);
    return static_cast<std::size_t>(std::max(1.0, std::ceil(v)));
}

}  // namespace

void TruncEstConfig::validate() const {
    if (!(eps_target > 0.0)) throw DomainError("eps_target must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must be in (0, 1)");
    if (n_init == 0 || m_per_candidate == 0 || min_steps == 0)
        throw DomainError("TruncEst counts must be at least 1");
    if (n_candidates && *n_candidates == 0) throw DomainError("n_candidates must be at least 1");
    if (max_accept_attempts && *max_accept_attempts == 0)
        throw DomainError("max_accept_attempts must be at least 1");
    if (eta && !(*eta > 0.0)) throw DomainError("eta must be positive");
    if (!(schedule_C > 0.0)) throw DomainError("schedule C must be positive");
}

TheoreticalSchedule theoretical_schedule(const SmoothnessConstants& c, std::size_t dim, double eps,
                                         double delta, double C, unsigned k) {
    c.validate();
    if (!(eps > 0.0)) throw DomainError("eps must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must be in (0, 1)");
    if (!(C > 0.0) || k == 0) throw DomainError("C > 0 and k >= 1 required");
    const double kappa = c.kappa, lambda = c.lambda, beta = c.ball_beta, alpha = c.positivity_alpha;
    TheoreticalSchedule s;
    s.C = C;
    s.d_alpha = eps * eps + 2.0 * beta * std::log(1.0 / alpha);
    const double expo = 6.0 * (lambda / (kappa * kappa)) * s.d_alpha * s.d_alpha;
    const double base = alpha * alpha * std::exp(-expo) / (4.0 * C * static_cast<double>(k));
    s.kappa_f = 0.5 * std::pow(base, 2.0 * static_cast<double>(k)) * kappa;
    s.lambda_f = std::exp(expo) / (alpha * alpha) * lambda;
    const double lead = 1.0 + 2.0 * lambda / kappa;
    const double inner = 12.0 * beta * lambda / (kappa * kappa) * s.d_alpha * s.d_alpha -
                         4.0 * beta * std::log(alpha) + eps * eps;
    s.rho_sq = static_cast<double>(dim) * (s.lambda_f + lambda) + lead * lead * inner * inner;
    s.G = s.rho_sq / (s.kappa_f * s.kappa_f * eps * eps);
    s.n = 2.0 * beta * std::log(1.0 / delta) / (eps * eps);
    s.eta = std::min(s.kappa_f * eps * eps / (2.0 * s.rho_sq), 1.0 / s.kappa_f);
    s.m = std::max(s.G, 0.5) * std::log(s.d_alpha / (kappa * eps * eps));
    return s;
}

ResolvedTruncEst resolve_trunc_est(const TruncEstConfig& config, const ExpFamily& family,
                                   std::size_t n_samples) {
    config.validate();
    const SmoothnessConstants& c = family.constants();
    ResolvedTruncEst r;
    r.eps_internal = config.eps_target / std::sqrt(3.0);
    r.n_candidates = config.n_candidates
                         ? *config.n_candidates
                         : std::max<std::size_t>(
                               10, 10 * static_cast<std::size_t>(std::ceil(std::log(1.0 / config.delta))));
    r.max_accept_attempts = config.max_accept_attempts
                                ? *config.max_accept_attempts
                                : static_cast<std::size_t>(std::ceil(10.0 / c.positivity_alpha));
    if (config.use_theoretical_schedule) {
        TheoreticalSchedule s = theoretical_schedule(c, family.dim(), r.eps_internal, config.delta,
                                                     config.schedule_C, family.suff_stat_degree());
        r.n_init = to_count(s.n);
        r.m = to_count(s.m);
        r.eta = config.eta ? *config.eta : s.eta;
    } else {
        r.n_init = config.n_init;
        r.m = config.m_per_candidate;
        r.eta = config.eta ? *config.eta : 0.01 * c.kappa;
    }
    r.projection_radius = (r.eps_internal * r.eps_internal +
                           2.0 * c.ball_beta * std::log(1.0 / c.positivity_alpha)) /
                          c.kappa;
    r.majority_radius = 2.0 * r.eps_internal * std::sqrt(3.0);

    if (r.n_init >= n_samples)
        throw InsufficientSamples("need more than " + std::to_string(r.n_init) +
                                  " samples for the warm start, have " + std::to_string(n_samples));
    const std::size_t available = n_samples - r.n_init;
    if (r.m > available / r.n_candidates) {
        if (!config.fit_to_data)
            throw InsufficientSamples("need " + std::to_string(r.n_init) + " + " +
                                      std::to_string(r.n_candidates) + " x " + std::to_string(r.m) +
                                      " samples, have " + std::to_string(n_samples));
        r.m = available / r.n_candidates;
        if (r.m < config.min_steps)
            throw InsufficientSamples("only " + std::to_string(r.m) +
                                      " SGD steps per candidate fit in " +
                                      std::to_string(n_samples) + " samples");
    }
    return r;
}

void sample_gradient_into(std::span<const double> z, std::span<const double> theta,
                          const FeaturePredicate& f, const ExpFamily& family, RngStream& rng,
                          std::size_t max_attempts, std::span<double> out, std::size_t* attempts) {
    if (max_attempts == 0) throw DomainError("max_attempts must be at least 1");
    thread_local Vector zp, tz;
    zp.resize(family.point_dim());
    tz.resize(family.dim());
    for (std::size_t t = 1; t <= max_attempts; ++t) {
        family.sample_into(theta, rng, zp);
        if (f(zp) == 1) {
            if (attempts) *attempts = t;
            family.suff_stat(zp, out);
            family.suff_stat(z, tz);
            for (std::size_t j = 0; j < out.size(); ++j) out[j] -= tz[j];
            return;
        }
    }
    throw AcceptanceFailure("no accepted sample in " + std::to_string(max_attempts) + " attempts");
}

Vector sample_gradient(std::span<const double> z, std::span<const double> theta,
                       const FeaturePredicate& f, const ExpFamily& family, RngStream& rng,
                       std::size_t max_attempts) {
    family.check_param(theta);
    Vector out(family.dim());
    sample_gradient_into(z, theta, f, family, rng, max_attempts, out);
    return out;
}

Vector mle_from_moments(const ExpFamily& family, std::span<const double> points) {
    const std::size_t pd = family.point_dim();
    if (points.empty() || points.size() % pd != 0) throw DomainError("samples must be nonempty rows");
    const std::size_t n = points.size() / pd;
    Vector mean(family.dim(), 0.0), t(family.dim());
    for (std::size_t i = 0; i < n; ++i) {
        family.suff_stat(points.subspan(i * pd, pd), t);
        for (std::size_t j = 0; j < t.size(); ++j) mean[j] += t[j];
    }
    for (double& v : mean) {
        v /= static_cast<double>(n);
        if (!std::isfinite(v)) throw DegenerateMoments("non-finite sufficient statistic mean");
    }
    if (auto closed = family.natural_from_mean(mean)) return *closed;

    // Projected gradient descent on W(theta) - theta . mean with step 1/lambda.
    const ParamSet& set = family.param_set();
    const double step = 1.0 / family.constants().lambda;
    Vector theta = set.project(Vector(family.dim(), 0.0));
    for (int it = 0; it < 100000; ++it) {
        Vector g = family.grad_log_partition(theta);
        Vector next(theta.size());
        for (std::size_t j = 0; j < theta.size(); ++j) next[j] = theta[j] - step * (g[j] - mean[j]);
        next = set.project(next);
        double moved = distance(next, theta) / step;
        theta = std::move(next);
        if (moved <= 1e-8) return theta;
    }
    throw DegenerateMoments("moment matching did not converge");
}

Vector project_to_feasible(std::span<const double> theta, std::span<const double> theta0,
                           double radius, const ParamSet& param_set) {
    if (!(radius > 0.0)) throw DomainError("projection radius must be positive");
    if (theta.size() != theta0.size() || theta.size() != param_set.dim())
        throw DomainError("dimension mismatch in projection");
    constexpr double tol = 1e-10;
    auto in_ball = [&](const Vector& v) { return distance(v, theta0) <= radius + tol; };
    auto to_ball = [&](const Vector& v) {
        double dist = distance(v, theta0);
        if (dist <= radius) return v;
        Vector out(v.size());
        for (std::size_t j = 0; j < v.size(); ++j)
            out[j] = theta0[j] + (v[j] - theta0[j]) * (radius / dist);
        return out;
    };
    Vector cur(theta.begin(), theta.end());
    for (int round = 0; round < 100; ++round) {
        cur = param_set.project(to_ball(cur));
        if (in_ball(cur) && param_set.contains(cur, tol)) return cur;
    }
    throw InfeasibleIntersection("projection ball and parameter set do not intersect");
}

std::optional<std::size_t> majority_candidate(const std::vector<Vector>& candidates, double radius) {
    const std::size_t n = candidates.size();
    std::optional<std::size_t> best;
    std::size_t best_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t count = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (distance(candidates[i], candidates[j]) <= radius) ++count;
        if (2 * count > n && count > best_count) {
            best = i;
            best_count = count;
        }
    }
    return best;
}

std::size_t densest_candidate(const std::vector<Vector>& candidates) {
    const std::size_t n = candidates.size();
    if (n == 0) throw DomainError("no candidates");
    const std::size_t kth = n / 2;  // zero-based index of the (floor(n/2)+1)-th nearest
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) d[j] = distance(candidates[i], candidates[j]);
        std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kth), d.end());
        if (d[kth] < best_d) {
            best_d = d[kth];
            best = i;
        }
    }
    return best;
}

Vector run_sgd_chain(std::span<const double> theta0, std::span<const double> points,
                     const FeaturePredicate& f, const ExpFamily& family,
                     const ResolvedTruncEst& schedule, bool tail_average, RngStream& rng,
                     std::vector<Vector>* trace) {
    const std::size_t pd = family.point_dim();
    const std::size_t steps = points.size() / pd;
    const std::size_t dim = family.dim();
    Vector theta(theta0.begin(), theta0.end());
    Vector grad(dim), avg(dim, 0.0);
    const std::size_t avg_from = steps / 2;
    std::size_t n_avg = 0;
    const std::size_t every = std::max<std::size_t>(1, steps / 20);
    if (trace) trace->clear();
    for (std::size_t s = 0; s < steps; ++s) {
        sample_gradient_into(points.subspan(s * pd, pd), theta, f, family, rng,
                             schedule.max_accept_attempts, grad);
        for (std::size_t j = 0; j < dim; ++j) theta[j] -= schedule.eta * grad[j];
        theta = project_to_feasible(theta, theta0, schedule.projection_radius, family.param_set());
        if (s >= avg_from) {
            for (std::size_t j = 0; j < dim; ++j) avg[j] += theta[j];
            ++n_avg;
        }
        if (trace && (s + 1) % every == 0 && trace->size() < 20) trace->push_back(theta);
    }
    if (!tail_average || n_avg == 0) return theta;
    for (double& v : avg) v /= static_cast<double>(n_avg);
    return avg;
}

namespace {

std::vector<Vector> run_candidates(std::span<const double> points, const Vector& theta_init,
                                   const FeaturePredicate& f, const ExpFamily& family,
                                   const ResolvedTruncEst& r, bool tail_average, RngStream& rng,
                                   std::size_t& failed) {
    const std::size_t pd = family.point_dim();
    std::vector<Vector> out;
    out.reserve(r.n_candidates);
    failed = 0;
    for (std::size_t j = 0; j < r.n_candidates; ++j) {
        auto slice = points.subspan((r.n_init + j * r.m) * pd, r.m * pd);
        RngStream chain_rng = rng.split(j);
        try {
            out.push_back(run_sgd_chain(theta_init, slice, f, family, r, tail_average, chain_rng));
        } catch (const AcceptanceFailure&) {
            ++failed;
        }
    }
    if (2 * failed >= r.n_candidates)
        throw AcceptanceFailure(std::to_string(failed) + " of " + std::to_string(r.n_candidates) +
                                " chains exhausted the rejection budget");
    return out;
}

}  // namespace

TruncEstResult trunc_est_detailed(std::span<const double> points, const FeaturePredicate& f,
                                  const ExpFamily& family, const TruncEstConfig& config,
                                  RngStream& rng) {
    const std::size_t pd = family.point_dim();
    if (points.size() % pd != 0) throw DomainError("sample buffer is not a whole number of rows");
    TruncEstResult res;
    res.schedule = resolve_trunc_est(config, family, points.size() / pd);
    const ResolvedTruncEst& r = res.schedule;

    auto attempt = [&](std::span<const double> data, RngStream& arng) {
        Vector init = mle_from_moments(family, data.subspan(0, r.n_init * pd));
        init = family.param_set().project(init);
        res.theta_init = init;
        res.candidates = run_candidates(data, init, f, family, r, config.tail_average, arng, res.failed_chains);
        return majority_candidate(res.candidates, r.majority_radius);
    };

    RngStream first = rng.split(0);
    auto pick = attempt(points, first);
    if (!pick) {
        // Retry once on a reshuffled copy of the data.
        res.retried = true;
        RngStream second = rng.split(1);
        const std::size_t n = points.size() / pd;
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[second.index(i)]);
        Vector shuffled(points.size());
        for (std::size_t i = 0; i < n; ++i)
            std::copy_n(points.begin() + static_cast<std::ptrdiff_t>(order[i] * pd), pd,
                        shuffled.begin() + static_cast<std::ptrdiff_t>(i * pd));
        pick = attempt(shuffled, second);
    }
    if (pick) {
        res.majority_found = true;
        res.theta = res.candidates[*pick];
    } else if (config.strict_majority) {
        throw NoMajorityCandidate("no candidate has a majority within radius " +
                                  std::to_string(r.majority_radius));
    } else {
        res.theta = res.candidates[densest_candidate(res.candidates)];
    }
    return res;
}

Vector trunc_est(std::span<const double> points, const FeaturePredicate& f,
                 const ExpFamily& family, const TruncEstConfig& config, RngStream& rng) {
    return trunc_est_detailed(points, f, family, config, rng).theta;
}

}  // namespace auditlab
