#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "auditlab/rng.hpp"

namespace auditlab {

struct DrawOutcome {
    int a;
    int y;
};

// A data-generating process over (x, a, y). Groups are 0..n_groups()-1.
class AuditInstance {
public:
    virtual ~AuditInstance() = default;

    virtual std::string kind() const = 0;
    virtual std::size_t n_groups() const = 0;
    virtual std::size_t point_dim() const = 0;
    // Writes x into `x` (size point_dim()) and returns (a, y).
    virtual DrawOutcome sample_into(RngStream& rng, std::span<double> x) const = 0;
};

// Decision rule f(x, a) in {0, 1}.
class Classifier {
public:
    enum class Kind { all_LR, wo_A_LR, random, sense_attr, custom };

    virtual ~Classifier() = default;

    virtual Kind kind() const = 0;
    virtual int predict(std::span<const double> x, int a) const = 0;

    // Row-major batch; the default loops over predict.
    virtual void predict_batch(std::span<const double> rows, std::size_t dim,
                               std::span<const int> groups, std::span<int> out) const;
};

const char* classifier_kind_name(Classifier::Kind kind);
Classifier::Kind classifier_kind_from_name(const std::string& name);

}  // namespace auditlab
