#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include "auditlab/instances/instance.hpp"
#include "auditlab/instances/labeled_data.hpp"

namespace testing {

struct ScriptedRow {
    int f;
    int y;
    int a;
};

// Replays rows in order; x = (f, index) so FirstCoordinate reproduces f.
class ScriptedInstance final : public auditlab::AuditInstance {
public:
    explicit ScriptedInstance(std::vector<ScriptedRow> rows, int n_groups = 2)
        : rows_(std::move(rows)), n_groups_(n_groups) {}

    std::string kind() const override { return "scripted"; }
    std::size_t n_groups() const override { return static_cast<std::size_t>(n_groups_); }
    std::size_t point_dim() const override { return 2; }
    auditlab::DrawOutcome sample_into(auditlab::RngStream&, std::span<double> x) const override {
        if (next_ >= rows_.size()) throw std::out_of_range("script exhausted");
        const ScriptedRow& r = rows_[next_];
        x[0] = r.f;
        x[1] = static_cast<double>(next_++);
        return {r.a, r.y};
    }

private:
    std::vector<ScriptedRow> rows_;
    int n_groups_;
    mutable std::size_t next_ = 0;
};

class FirstCoordinate final : public auditlab::Classifier {
public:
    Kind kind() const override { return Kind::custom; }
    int predict(std::span<const double> x, int) const override { return x[0] > 0.5 ? 1 : 0; }
};

// Two groups with P[A=1] = group1, identical conditionals: x ~ U{0..9}, y = 1{x < 4}.
inline auditlab::LabeledData symmetric_rows(int n_group0, int n_group1) {
    auditlab::LabeledData d;
    d.dim = 1;
    for (int a = 0; a < 2; ++a)
        for (int i = 0; i < (a ? n_group1 : n_group0); ++i) {
            const double x = i % 10;
            d.push_back(std::vector<double>{x}, a, x < 4 ? 1 : 0);
        }
    return d;
}

}  // namespace testing
