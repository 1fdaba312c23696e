#include "auditlab/instances/summary.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "auditlab/errors.hpp"
#include "auditlab/instances/classifiers.hpp"
#include "auditlab/instances/empirical.hpp"
#include "auditlab/instances/lower_bound.hpp"
#include "auditlab/instances/mixture.hpp"
#include "auditlab/simd/kernels.hpp"

namespace auditlab {

CellMasses::CellMasses(std::size_t n_groups) {
    for (int y = 0; y < 2; ++y) {
        q[y].assign(n_groups, 0.0);
        p[y].assign(n_groups, 0.0);
    }
}

PopulationSummary summarize_cells(const CellMasses& cells) {
    const std::size_t k = cells.n_groups();
    PopulationSummary s;
    s.n_groups = k;
    s.group_probs.assign(k, 0.0);
    s.beta_a.assign(k, 0.0);
    s.q_min_a.assign(k, 0.0);
    s.q_max_a.assign(k, 0.0);
    for (int y = 0; y < 2; ++y) {
        s.p_joint[y] = cells.p[y];
        s.q_joint[y] = cells.q[y];
        s.p_cond[y].assign(k, 0.0);
        s.q_cond[y].assign(k, 0.0);
    }
    for (std::size_t a = 0; a < k; ++a) {
        for (int y = 0; y < 2; ++y)
            if (!(cells.q[y][a] > 0.0))
                throw IllPosed("cell (y=" + std::to_string(y) + ", a=" + std::to_string(a) +
                               ") has zero mass");
        s.group_probs[a] = cells.q[0][a] + cells.q[1][a];
    }
    double positive = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
        double pa = s.group_probs[a];
        double accepted = 0.0;
        for (int y = 0; y < 2; ++y) {
            s.p_cond[y][a] = cells.p[y][a] / pa;
            s.q_cond[y][a] = cells.q[y][a] / pa;
            accepted += cells.p[y][a];
            s.gamma[1][y] += cells.p[y][a];
            s.gamma[0][y] += cells.q[y][a] - cells.p[y][a];
        }
        positive += accepted;
        s.beta_a[a] = 1.0 - accepted / pa;
        s.q_min_a[a] = std::min(s.q_cond[0][a], s.q_cond[1][a]);
        s.q_max_a[a] = std::max(s.q_cond[0][a], s.q_cond[1][a]);
    }
    s.beta_neg_rate = 1.0 - positive;
    double eod = 0.0;
    for (int y = 0; y < 2; ++y) {
        double lo = 1.0, hi = 0.0;
        for (std::size_t a = 0; a < k; ++a) {
            double r = s.acceptance(y, a);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        eod = std::max(eod, hi - lo);
    }
    s.eod = eod;
    return s;
}

namespace {

PopulationSummary exact_empirical(const EmpiricalAuditInstance& inst, const Classifier& f) {
    const LabeledData& rows = inst.rows();
    std::vector<int> pred(rows.size());
    f.predict_batch(rows.x, rows.dim, rows.a, pred);
    std::array<std::vector<std::size_t>, 2> nq, np;
    for (int y = 0; y < 2; ++y) {
        nq[y].assign(inst.n_groups(), 0);
        np[y].assign(inst.n_groups(), 0);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto a = static_cast<std::size_t>(rows.a[i]);
        ++nq[rows.y[i]][a];
        if (pred[i] == 1) ++np[rows.y[i]][a];
    }
    CellMasses c(inst.n_groups());
    const double n = static_cast<double>(rows.size());
    for (int y = 0; y < 2; ++y)
        for (std::size_t a = 0; a < inst.n_groups(); ++a) {
            c.q[y][a] = static_cast<double>(nq[y][a]) / n;
            c.p[y][a] = static_cast<double>(np[y][a]) / n;
        }
    return summarize_cells(c);
}

PopulationSummary exact_lower_bound(const LowerBoundInstance& inst, const Classifier& f) {
    if (&f != inst.classifier().get() && dynamic_cast<const LowerBoundClassifier*>(&f) == nullptr)
        throw DomainError("exact lower-bound summary needs the instance's own classifier");
    PopulationSummary s = summarize_cells(inst.cells());
    s.eod = to_double(inst.exact_eod());
    return s;
}

PopulationSummary exact_mixture(const MixtureAuditInstance& inst, const GroupHalfspaceClassifier& f) {
    const auto* gauss = dynamic_cast<const SphericalGaussian*>(&inst.family());
    if (gauss == nullptr) throw DomainError("exact mixture summary needs a spherical Gaussian");
    const boost::math::normal standard;
    const double sd = std::sqrt(gauss->sigma2());
    CellMasses c(inst.n_groups());
    for (std::size_t a = 0; a < inst.n_groups(); ++a) {
        const Vector& v = f.directions().at(a);
        const double vn = std::sqrt(simd::dot(v, v));
        for (int y = 0; y < 2; ++y) {
            double py = y == 1 ? inst.label_probs()[a] : 1.0 - inst.label_probs()[a];
            Vector mu = gauss->mean_from_theta(inst.theta(y, a));
            double margin = simd::dot(v, mu) - f.offsets()[a];
            double acc = vn > 0.0 ? boost::math::cdf(standard, margin / (sd * vn)) : (margin >= 0.0 ? 1.0 : 0.0);
            c.q[y][a] = inst.group_probs()[a] * py;
            c.p[y][a] = c.q[y][a] * acc;
        }
    }
    return summarize_cells(c);
}

}  // namespace

PopulationSummary monte_carlo_summary(const AuditInstance& instance, const Classifier& classifier,
                                      std::size_t n, RngStream& rng) {
    if (n == 0) throw DomainError("Monte Carlo summary needs n >= 1");
    CellMasses c(instance.n_groups());
    Vector x(instance.point_dim());
    const double w = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        DrawOutcome d = instance.sample_into(rng, x);
        auto a = static_cast<std::size_t>(d.a);
        c.q[d.y][a] += w;
        if (classifier.predict(x, d.a) == 1) c.p[d.y][a] += w;
    }
    return summarize_cells(c);
}

PopulationSummary population_summary(const AuditInstance& instance, const Classifier& classifier,
                                     const SummaryMode& mode) {
    if (const auto* mc = std::get_if<MonteCarloMode>(&mode)) {
        RngStream rng(mc->seed);
        return monte_carlo_summary(instance, classifier, mc->n, rng);
    }
    if (const auto* e = dynamic_cast<const EmpiricalAuditInstance*>(&instance))
        return exact_empirical(*e, classifier);
    if (const auto* lb = dynamic_cast<const LowerBoundInstance*>(&instance))
        return exact_lower_bound(*lb, classifier);
    if (const auto* m = dynamic_cast<const MixtureAuditInstance*>(&instance)) {
        if (const auto* h = dynamic_cast<const GroupHalfspaceClassifier*>(&classifier))
            return exact_mixture(*m, *h);
        if (const auto* k = dynamic_cast<const ConstantClassifier*>(&classifier)) {
            CellMasses c(m->n_groups());
            for (std::size_t a = 0; a < m->n_groups(); ++a) {
                c.q[1][a] = m->group_probs()[a] * m->label_probs()[a];
                c.q[0][a] = m->group_probs()[a] * (1.0 - m->label_probs()[a]);
                for (int y = 0; y < 2; ++y) c.p[y][a] = k->value() ? c.q[y][a] : 0.0;
            }
            return summarize_cells(c);
        }
    }
    throw DomainError("exact summary unavailable for this instance/classifier; use Monte Carlo");
}

}  // namespace auditlab
