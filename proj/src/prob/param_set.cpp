#include "auditlab/prob/param_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "auditlab/errors.hpp"
#include "auditlab/simd/kernels.hpp"

namespace auditlab {

double norm(std::span<const double> v) { return std::sqrt(simd::dot(v, v)); }

double distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(simd::squared_distance(a, b));
}

ParamSet ParamSet::ball(Vector center, double radius) {
    if (center.empty()) throw DomainError("ball center must be nonempty");
    if (!(radius > 0.0)) throw DomainError("ball radius must be positive");
    ParamSet s;
    s.kind_ = Kind::ball;
    s.center_ = std::move(center);
    s.radius_ = radius;
    return s;
}

ParamSet ParamSet::box(Vector lo, Vector hi) {
    if (lo.empty() || lo.size() != hi.size()) throw DomainError("box bounds must match in size");
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (!(lo[i] <= hi[i])) throw DomainError("box lower bound exceeds upper bound");
    ParamSet s;
    s.kind_ = Kind::box;
    s.lo_ = std::move(lo);
    s.hi_ = std::move(hi);
    return s;
}

ParamSet ParamSet::whole_space(std::size_t dim) {
    const double inf = std::numeric_limits<double>::infinity();
    return box(Vector(dim, -inf), Vector(dim, inf));
}

bool ParamSet::contains(std::span<const double> theta, double tol) const {
    if (theta.size() != dim()) return false;
    if (kind_ == Kind::ball) return distance(theta, center_) <= radius_ + tol;
    for (std::size_t i = 0; i < theta.size(); ++i)
        if (theta[i] < lo_[i] - tol || theta[i] > hi_[i] + tol) return false;
    return true;
}

Vector ParamSet::project(std::span<const double> theta) const {
    if (theta.size() != dim()) throw DomainError("parameter dimension mismatch");
    Vector out(theta.begin(), theta.end());
    if (kind_ == Kind::ball) {
        double d = distance(theta, center_);
        if (d > radius_) {
            double s = radius_ / d;
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] = center_[i] + s * (theta[i] - center_[i]);
        }
        return out;
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lo_[i], hi_[i]);
    return out;
}

}  // namespace auditlab
