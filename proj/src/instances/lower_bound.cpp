#include "auditlab/instances/lower_bound.hpp"

#include <cmath>
#include <cctype>

#include "auditlab/errors.hpp"

namespace auditlab {

using boost::multiprecision::cpp_int;

namespace {

cpp_int pow10(long n) {
    cpp_int r = 1;
    for (long i = 0; i < n; ++i) r *= 10;
    return r;
}

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

Rational parse_decimal(std::string s) {
    bool neg = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        neg = s[0] == '-';
        s.erase(0, 1);
    }
    long exponent = 0;
    auto epos = s.find_first_of("eE");
    if (epos != std::string::npos) {
        std::string e = s.substr(epos + 1);
        s.resize(epos);
        bool eneg = !e.empty() && e[0] == '-';
        if (!e.empty() && (e[0] == '-' || e[0] == '+')) e.erase(0, 1);
        if (!all_digits(e)) throw DomainError("malformed exponent");
        exponent = std::stol(e) * (eneg ? -1 : 1);
    }
    std::string digits = s;
    long frac = 0;
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        frac = static_cast<long>(s.size() - dot - 1);
        digits = s.substr(0, dot) + s.substr(dot + 1);
    }
    if (!all_digits(digits)) throw DomainError("malformed number: " + s);
    cpp_int num(digits);
    long shift = exponent - frac;
    Rational r = shift >= 0 ? Rational(num * pow10(shift)) : Rational(num, pow10(-shift));
    return neg ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) return parse_decimal(text);
    Rational num = parse_decimal(text.substr(0, slash));
    Rational den = parse_decimal(text.substr(slash + 1));
    if (den == 0) throw DomainError("zero denominator");
    return num / den;
}

Rational to_rational(double value) {
    if (!std::isfinite(value)) throw DomainError("non-finite value");
    if (value == 0.0) return Rational(0);
    int exp = 0;
    double mant = std::frexp(value, &exp);
    auto scaled = static_cast<long long>(std::ldexp(mant, 53));
    exp -= 53;
    cpp_int num(scaled);
    if (exp >= 0) return Rational(num << exp);
    cpp_int den = cpp_int(1) << -exp;
    return Rational(num, den);
}

std::string rational_to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

const char* hypothesis_name(Hypothesis h) { return h == Hypothesis::fair ? "FAIR" : "UNFAIR"; }

LowerBoundInstance::LowerBoundInstance(Rational eps, Rational p, Rational q, Hypothesis hypothesis,
                                       Rational group1_prob)
    : eps_(std::move(eps)), p_(std::move(p)), q_(std::move(q)), group1_(std::move(group1_prob)),
      hypothesis_(hypothesis) {
    const Rational quarter(1, 4), half(1, 2);
    if (!(eps_ > 0 && eps_ < quarter)) throw DomainError("eps must be in (0, 1/4)");
    if (!(p_ > 0 && p_ < half)) throw DomainError("p must be in (0, 1/2)");
    if (!(q_ > 0 && q_ < half)) throw DomainError("q must be in (0, 1/2)");
    const Rational q_up = q_ * (1 + 4 * eps_);
    if (q_up > 1) throw DomainError("need q(1+4eps) <= 1");
    if (p_ / 2 > 1 - q_up) throw DomainError("need p/2 <= 1 - q(1+4eps)");
    if (p_ * q_up > (1 - q_) * (1 - q_up))
        throw DomainError("need p q (1+4eps) <= (1-q)(1-q(1+4eps)) so the Y=1 gap is the EOD");
    if (!(group1_ > 0 && group1_ < 1)) throw DomainError("group probability must be in (0, 1)");

    std::array<std::array<double, 2>, 2> acc{};
    for (int y = 0; y < 2; ++y)
        for (int a = 0; a < 2; ++a) acc[y][a] = to_double(acceptance(y, a));
    classifier_ = std::make_shared<LowerBoundClassifier>(acc);
    label_prob_d_ = {to_double(label_prob(0)), to_double(label_prob(1))};
    group1_d_ = to_double(group1_);
}

Rational LowerBoundInstance::group_prob(int a) const { return a == 1 ? group1_ : Rational(1 - group1_); }

Rational LowerBoundInstance::label_prob(int a) const {
    if (hypothesis_ == Hypothesis::unfair && a == 1) return q_ * (1 + 4 * eps_);
    return q_;
}

Rational LowerBoundInstance::acceptance(int y, int a) const {
    const bool shifted = hypothesis_ == Hypothesis::unfair && a == 1;
    if (y == 1) return shifted ? Rational(1 / (2 * (1 + 4 * eps_))) : Rational(1, 2);
    return shifted ? Rational(p_ / (2 * (1 - q_ - 4 * eps_ * q_))) : Rational(p_ / (2 * (1 - q_)));
}

Rational LowerBoundInstance::joint(int f, int y, int a) const {
    Rational py = y == 1 ? label_prob(a) : Rational(1 - label_prob(a));
    Rational acc = acceptance(y, a);
    return f == 1 ? Rational(py * acc) : Rational(py * (1 - acc));
}

Rational LowerBoundInstance::exact_eod() const {
    Rational best = 0;
    for (int y = 0; y < 2; ++y) {
        Rational d = acceptance(y, 1) - acceptance(y, 0);
        if (d < 0) d = -d;
        if (d > best) best = d;
    }
    return best;
}

CellMasses LowerBoundInstance::cells() const {
    CellMasses c(2);
    for (int y = 0; y < 2; ++y)
        for (int a = 0; a < 2; ++a) {
            Rational qy = y == 1 ? label_prob(a) : Rational(1 - label_prob(a));
            c.q[y][a] = to_double(group_prob(a) * qy);
            c.p[y][a] = to_double(group_prob(a) * joint(1, y, a));
        }
    return c;
}

DrawOutcome LowerBoundInstance::sample_into(RngStream& rng, std::span<double> x) const {
    const int a = rng.uniform() < group1_d_ ? 1 : 0;
    const int y = rng.bernoulli(label_prob_d_[static_cast<std::size_t>(a)]) ? 1 : 0;
    x[0] = rng.uniform();
    x[1] = static_cast<double>(y);
    return {a, y};
}

int LowerBoundClassifier::predict(std::span<const double> x, int a) const {
    const int y = x[1] != 0.0 ? 1 : 0;
    return x[0] < acceptance_[static_cast<std::size_t>(y)][static_cast<std::size_t>(a)] ? 1 : 0;
}

std::pair<LowerBoundInstance, LowerBoundInstance> make_lower_bound_pair(
    const Rational& eps, const Rational& p, const Rational& q, const Rational& group1_prob) {
    return {LowerBoundInstance(eps, p, q, Hypothesis::fair, group1_prob),
            LowerBoundInstance(eps, p, q, Hypothesis::unfair, group1_prob)};
}

std::pair<LowerBoundInstance, LowerBoundInstance> make_lower_bound_pair(double eps, double p,
                                                                        double q) {
    return make_lower_bound_pair(to_rational(eps), to_rational(p), to_rational(q));
}

}  // namespace auditlab
