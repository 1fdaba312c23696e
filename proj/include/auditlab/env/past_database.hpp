#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "auditlab/instances/instance.hpp"
#include "auditlab/prob/param_set.hpp"
#include "auditlab/rng.hpp"

namespace auditlab {

// Historical decisions in draw order. Labels exist only for f = 1 records.
class PastDatabase {
public:
    explicit PastDatabase(std::size_t dim);

    void reserve(std::size_t n);
    void append(std::span<const double> x, int a, int f, std::optional<int> y);

    std::size_t size() const { return groups_.size(); }
    std::size_t dim() const { return dim_; }
    std::span<const double> features(std::size_t i) const {
        return std::span<const double>(x_).subspan(i * dim_, dim_);
    }
    int group(std::size_t i) const { return groups_[i]; }
    int decision(std::size_t i) const { return decisions_[i]; }
    std::optional<int> label(std::size_t i) const;
    std::size_t n_positives() const;

    // Row-major features of the f = 1, Y = y, A = a records, in stored order.
    Vector positive_cell(int y, int a) const;

    // Header x_0..x_{d-1},a,f,y; y left empty when f = 0.
    void write_csv(std::ostream& out) const;
    static PastDatabase read_csv(std::istream& in);
    void save(const std::string& path) const;
    static PastDatabase load(const std::string& path);

private:
    std::size_t dim_;
    Vector x_;
    std::vector<std::int32_t> groups_;
    std::vector<std::int8_t> decisions_;
    std::vector<std::int8_t> labels_;  // -1 when hidden
};

PastDatabase generate_past_database(const AuditInstance& instance, const Classifier& classifier,
                                    std::size_t n, RngStream& rng);

}  // namespace auditlab
