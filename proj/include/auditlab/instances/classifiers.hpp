#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "auditlab/instances/instance.hpp"
#include "auditlab/prob/param_set.hpp"

namespace auditlab {

// f(x, a) = a for binary groups.
class SenseAttrClassifier final : public Classifier {
public:
    Kind kind() const override { return Kind::sense_attr; }
    int predict(std::span<const double> x, int a) const override;
};

// Ber(1/2) per row identity (bit pattern of x together with a), fixed by seed.
class RandomClassifier final : public Classifier {
public:
    explicit RandomClassifier(std::uint64_t seed) : seed_(seed) {}
    Kind kind() const override { return Kind::random; }
    int predict(std::span<const double> x, int a) const override;
    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

class ConstantClassifier final : public Classifier {
public:
    explicit ConstantClassifier(int value) : value_(value ? 1 : 0) {}
    Kind kind() const override { return Kind::custom; }
    int predict(std::span<const double>, int) const override { return value_; }
    int value() const { return value_; }

private:
    int value_;
};

// f(x, a) = 1{ directions[a] . x >= offsets[a] }.
class GroupHalfspaceClassifier final : public Classifier {
public:
    GroupHalfspaceClassifier(std::vector<Vector> directions, Vector offsets);
    Kind kind() const override { return Kind::custom; }
    int predict(std::span<const double> x, int a) const override;

    const std::vector<Vector>& directions() const { return directions_; }
    const Vector& offsets() const { return offsets_; }

private:
    std::vector<Vector> directions_;
    Vector offsets_;
};

enum class BuiltinKind { random, sense_attr };

std::shared_ptr<const Classifier> builtin_classifier(BuiltinKind kind, std::uint64_t seed);

}  // namespace auditlab
