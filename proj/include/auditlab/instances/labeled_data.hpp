#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "auditlab/prob/param_set.hpp"

namespace auditlab {

// Numeric rows (x, a, y) with x stored row-major.
struct LabeledData {
    std::size_t dim = 0;
    Vector x;
    std::vector<int> a;
    std::vector<int> y;

    std::size_t size() const { return a.size(); }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(x).subspan(i * dim, dim);
    }
    void push_back(std::span<const double> xi, int ai, int yi);
    LabeledData subset(std::span<const std::size_t> indices) const;
};

}  // namespace auditlab
