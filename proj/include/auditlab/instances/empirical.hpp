#pragma once

#include "auditlab/instances/instance.hpp"
#include "auditlab/instances/labeled_data.hpp"

namespace auditlab {

// Uniform-with-replacement draws over a fixed table of rows.
class EmpiricalAuditInstance final : public AuditInstance {
public:
    // Throws IllPosed unless every group has both labels; groups must be 0..k-1.
    explicit EmpiricalAuditInstance(LabeledData rows);

    std::string kind() const override { return "empirical"; }
    std::size_t n_groups() const override { return n_groups_; }
    std::size_t point_dim() const override { return rows_.dim; }
    DrawOutcome sample_into(RngStream& rng, std::span<double> x) const override;

    const LabeledData& rows() const { return rows_; }

private:
    LabeledData rows_;
    std::size_t n_groups_ = 0;
};

}  // namespace auditlab
