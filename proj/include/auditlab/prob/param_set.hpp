#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace auditlab {

using Vector = std::vector<double>;

// Convex parameter set: a Euclidean ball or an axis-aligned box (bounds may be infinite).
class ParamSet {
public:
    enum class Kind { ball, box };

    static ParamSet ball(Vector center, double radius);
    static ParamSet box(Vector lo, Vector hi);
    static ParamSet whole_space(std::size_t dim);

    Kind kind() const { return kind_; }
    std::size_t dim() const { return kind_ == Kind::ball ? center_.size() : lo_.size(); }

    bool contains(std::span<const double> theta, double tol = 1e-12) const;
    Vector project(std::span<const double> theta) const;

    const Vector& center() const { return center_; }
    double radius() const { return radius_; }
    const Vector& lo() const { return lo_; }
    const Vector& hi() const { return hi_; }

private:
    ParamSet() = default;

    Kind kind_ = Kind::box;
    Vector center_;
    double radius_ = 0.0;
    Vector lo_;
    Vector hi_;
};

double norm(std::span<const double> v);
double distance(std::span<const double> a, std::span<const double> b);

}  // namespace auditlab
