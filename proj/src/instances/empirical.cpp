#include "auditlab/instances/empirical.hpp"

#include <algorithm>
#include <array>
#include <vector>

#include "auditlab/errors.hpp"

namespace auditlab {

EmpiricalAuditInstance::EmpiricalAuditInstance(LabeledData rows) : rows_(std::move(rows)) {
    if (rows_.size() == 0) throw IllPosed("empirical instance has no rows");
    int max_group = 0;
    for (int a : rows_.a) {
        if (a < 0) throw DomainError("group labels must be non-negative");
        max_group = std::max(max_group, a);
    }
    n_groups_ = static_cast<std::size_t>(max_group) + 1;
    if (n_groups_ < 2) throw IllPosed("empirical instance needs at least two groups");
    std::vector<std::array<bool, 2>> seen(n_groups_, {false, false});
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (rows_.y[i] != 0 && rows_.y[i] != 1) throw DomainError("labels must be 0 or 1");
        seen[static_cast<std::size_t>(rows_.a[i])][static_cast<std::size_t>(rows_.y[i])] = true;
    }
    for (std::size_t a = 0; a < n_groups_; ++a)
        if (!seen[a][0] || !seen[a][1])
            throw IllPosed("group " + std::to_string(a) + " lacks one of the labels");
}

DrawOutcome EmpiricalAuditInstance::sample_into(RngStream& rng, std::span<double> x) const {
    const std::size_t i = rng.index(rows_.size());
    auto r = rows_.row(i);
    std::copy(r.begin(), r.end(), x.begin());
    return {rows_.a[i], rows_.y[i]};
}

}  // namespace auditlab
