#include "auditlab/instances/classifiers.hpp"

#include <cstring>

#include "auditlab/errors.hpp"
#include "auditlab/rng.hpp"
#include "auditlab/simd/kernels.hpp"

namespace auditlab {

void Classifier::predict_batch(std::span<const double> rows, std::size_t dim,
                               std::span<const int> groups, std::span<int> out) const {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = predict(rows.subspan(i * dim, dim), groups[i]);
}

const char* classifier_kind_name(Classifier::Kind kind) {
    switch (kind) {
        case Classifier::Kind::all_LR: return "all_LR";
        case Classifier::Kind::wo_A_LR: return "wo_A_LR";
        case Classifier::Kind::random: return "random";
        case Classifier::Kind::sense_attr: return "sense_attr";
        case Classifier::Kind::custom: return "custom";
    }
    return "custom";
}

Classifier::Kind classifier_kind_from_name(const std::string& name) {
    if (name == "all_LR") return Classifier::Kind::all_LR;
    if (name == "wo_A_LR") return Classifier::Kind::wo_A_LR;
    if (name == "random") return Classifier::Kind::random;
    if (name == "sense_attr") return Classifier::Kind::sense_attr;
    if (name == "custom") return Classifier::Kind::custom;
    throw DomainError("unknown classifier kind: " + name);
}

int SenseAttrClassifier::predict(std::span<const double>, int a) const { return a != 0 ? 1 : 0; }

int RandomClassifier::predict(std::span<const double> x, int a) const {
    std::uint64_t h = mix_seed(seed_, static_cast<std::uint64_t>(a));
    for (double v : x) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &v, sizeof bits);
        h = mix_seed(h, bits);
    }
    return static_cast<int>(h >> 63);
}

GroupHalfspaceClassifier::GroupHalfspaceClassifier(std::vector<Vector> directions, Vector offsets)
    : directions_(std::move(directions)), offsets_(std::move(offsets)) {
    if (directions_.empty() || directions_.size() != offsets_.size())
        throw DomainError("one direction and one offset per group required");
}

int GroupHalfspaceClassifier::predict(std::span<const double> x, int a) const {
    const auto g = static_cast<std::size_t>(a);
    if (g >= directions_.size()) throw DomainError("group out of range for halfspace classifier");
    return simd::dot(directions_[g], x) >= offsets_[g] ? 1 : 0;
}

std::shared_ptr<const Classifier> builtin_classifier(BuiltinKind kind, std::uint64_t seed) {
    if (kind == BuiltinKind::sense_attr) return std::make_shared<SenseAttrClassifier>();
    return std::make_shared<RandomClassifier>(seed);
}

}  // namespace auditlab
