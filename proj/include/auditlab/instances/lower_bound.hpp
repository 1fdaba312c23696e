#pragma once

#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <memory>
#include <string>
#include <utility>

#include "auditlab/instances/instance.hpp"
#include "auditlab/instances/summary.hpp"

namespace auditlab {

using Rational = boost::multiprecision::cpp_rational;

// Accepts "3", "-0.125", "1/10"; decimals are read exactly.
Rational parse_rational(const std::string& text);
// Exact value of a binary double.
Rational to_rational(double value);
std::string rational_to_string(const Rational& r);
double to_double(const Rational& r);

enum class Hypothesis { fair, unfair };

const char* hypothesis_name(Hypothesis h);

// f | Y=y, A=a ~ Ber(pi_{y,a}); both groups share the FAIR law except group 1
// under UNFAIR. The point is (u, y) with u uniform, so f(x, a) = 1{u < pi_{y,a}}.
class LowerBoundInstance final : public AuditInstance {
public:
    LowerBoundInstance(Rational eps, Rational p, Rational q, Hypothesis hypothesis,
                       Rational group1_prob = Rational(1, 2));

    std::string kind() const override { return "lower_bound"; }
    std::size_t n_groups() const override { return 2; }
    std::size_t point_dim() const override { return 2; }
    DrawOutcome sample_into(RngStream& rng, std::span<double> x) const override;

    const Rational& eps() const { return eps_; }
    const Rational& p() const { return p_; }
    const Rational& q() const { return q_; }
    Hypothesis hypothesis() const { return hypothesis_; }

    Rational group_prob(int a) const;
    Rational label_prob(int a) const;              // q_{1|a}
    Rational acceptance(int y, int a) const;       // P[f=1 | Y=y, A=a]
    Rational joint(int f, int y, int a) const;     // P[f, Y=y | A=a]
    Rational exact_eod() const;
    CellMasses cells() const;

    std::shared_ptr<const Classifier> classifier() const { return classifier_; }

private:
    Rational eps_, p_, q_, group1_;
    Hypothesis hypothesis_;
    std::array<double, 2> label_prob_d_{};
    double group1_d_ = 0.5;
    std::shared_ptr<const Classifier> classifier_;
};

class LowerBoundClassifier final : public Classifier {
public:
    explicit LowerBoundClassifier(std::array<std::array<double, 2>, 2> acceptance)
        : acceptance_(acceptance) {}
    Kind kind() const override { return Kind::custom; }
    int predict(std::span<const double> x, int a) const override;

private:
    std::array<std::array<double, 2>, 2> acceptance_;  // [y][a]
};

// Throws DomainError unless eps in (0, 1/4), p, q in (0, 1/2), q(1+4eps) <= 1,
// p/2 <= 1 - q(1+4eps) (keeps the UNFAIR Y=0 acceptance a probability) and
// p q (1+4eps) <= (1-q)(1-q(1+4eps)) (the Y=0 gap stays below the Y=1 gap).
std::pair<LowerBoundInstance, LowerBoundInstance> make_lower_bound_pair(
    const Rational& eps, const Rational& p, const Rational& q,
    const Rational& group1_prob = Rational(1, 2));
std::pair<LowerBoundInstance, LowerBoundInstance> make_lower_bound_pair(double eps, double p,
                                                                        double q);

}  // namespace auditlab
