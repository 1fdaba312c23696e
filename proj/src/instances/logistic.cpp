#include "auditlab/instances/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "auditlab/errors.hpp"
#include "auditlab/simd/kernels.hpp"

namespace auditlab {

void LabeledData::push_back(std::span<const double> xi, int ai, int yi) {
    if (size() == 0 && dim == 0) dim = xi.size();
    if (xi.size() != dim) throw DomainError("row dimension mismatch");
    x.insert(x.end(), xi.begin(), xi.end());
    a.push_back(ai);
    y.push_back(yi);
}

LabeledData LabeledData::subset(std::span<const std::size_t> indices) const {
    LabeledData out;
    out.dim = dim;
    out.x.reserve(indices.size() * dim);
    for (std::size_t i : indices) out.push_back(row(i), a[i], y[i]);
    return out;
}

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double logit_of(double p) { return std::log(p / (1.0 - p)); }

double mean_loss(std::span<const double> scores, std::span<const int> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i)
        s += softplus(scores[i]) - (y[i] != 0 ? scores[i] : 0.0);
    return s / static_cast<double>(scores.size());
}

}  // namespace

double LogisticModel::logit(std::span<const double> x, int a) const {
    double z = bias;
    for (std::size_t j = 0; j < center.size(); ++j) z += weights[j] * (x[j] - center[j]) / scale[j];
    if (include_sensitive) z += weights.back() * static_cast<double>(a);
    return z;
}

double LogisticModel::probability(std::span<const double> x, int a) const {
    return sigmoid(logit(x, a));
}

int LogisticModel::predict(std::span<const double> x, int a) const {
    return probability(x, a) >= threshold ? 1 : 0;
}

LogisticModel train_logistic(const LabeledData& data, const LogisticConfig& config, RngStream& rng,
                             std::vector<double>* loss_history) {
    if (data.size() == 0) throw DegenerateData("training set is empty");
    if (!(config.learning_rate > 0.0)) throw DomainError("learning_rate must be positive");
    if (!(config.threshold > 0.0 && config.threshold < 1.0))
        throw DomainError("threshold must be in (0, 1)");

    LabeledData sub;
    const LabeledData* train = &data;
    if (config.train_size > 0 && config.train_size < data.size()) {
        std::vector<std::size_t> idx(data.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (std::size_t i = 0; i < config.train_size; ++i)
            std::swap(idx[i], idx[i + rng.index(idx.size() - i)]);
        idx.resize(config.train_size);
        sub = data.subset(idx);
        train = &sub;
    }

    const std::size_t n = train->size();
    const std::size_t d = train->dim;
    LogisticModel model;
    model.include_sensitive = !config.exclude_sensitive;
    model.threshold = config.threshold;
    model.center.assign(d, 0.0);
    model.scale.assign(d, 1.0);

    const std::size_t positives =
        static_cast<std::size_t>(std::count_if(train->y.begin(), train->y.end(), [](int v) { return v != 0; }));
    const std::size_t width = d + (model.include_sensitive ? 1 : 0);
    model.weights.assign(width, 0.0);
    if (positives == 0 || positives == n) {
        if (!config.allow_single_class) throw DegenerateData("training labels contain a single class");
        model.bias = positives == n ? 30.0 : -30.0;
        return model;
    }

    for (std::size_t j = 0; j < d; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m += train->x[i * d + j];
        m /= static_cast<double>(n);
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double e = train->x[i * d + j] - m;
            v += e * e;
        }
        double sd = std::sqrt(v / static_cast<double>(n));
        model.center[j] = m;
        model.scale[j] = sd > 1e-12 ? sd : 1.0;
    }

    Vector z(n * width);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j)
            z[i * width + j] = (train->x[i * d + j] - model.center[j]) / model.scale[j];
        if (model.include_sensitive) z[i * width + d] = static_cast<double>(train->a[i]);
    }

    const auto& k = simd::active();
    Vector scores(n), resid(n), grad(width), trial(width);
    Vector w = model.weights;
    double b = 0.0;
    k.affine_scores(z.data(), n, width, w.data(), b, scores.data());
    double loss = mean_loss(scores, train->y);
    if (loss_history) loss_history->assign(1, loss);
    double lr = config.learning_rate;
    const double inv_n = 1.0 / static_cast<double>(n);

    for (std::size_t it = 0; it < config.iterations; ++it) {
        double gb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            resid[i] = (sigmoid(scores[i]) - (train->y[i] != 0 ? 1.0 : 0.0)) * inv_n;
            gb += resid[i];
        }
        std::fill(grad.begin(), grad.end(), 0.0);
        k.accumulate_weighted_rows(z.data(), n, width, resid.data(), grad.data());

        for (int attempt = 0; attempt < 60; ++attempt) {
            for (std::size_t j = 0; j < width; ++j) trial[j] = w[j] - lr * grad[j];
            double tb = b - lr * gb;
            k.affine_scores(z.data(), n, width, trial.data(), tb, scores.data());
            double next = mean_loss(scores, train->y);
            if (next <= loss) {
                w = trial;
                b = tb;
                loss = next;
                break;
            }
            lr *= 0.5;
            if (attempt == 59) k.affine_scores(z.data(), n, width, w.data(), b, scores.data());
        }
        if (loss_history) loss_history->push_back(loss);
    }

    model.weights = w;
    model.bias = b;
    return model;
}

double log_loss(const LogisticModel& model, const LabeledData& data) {
    Vector scores(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) scores[i] = model.logit(data.row(i), data.a[i]);
    return mean_loss(scores, data.y);
}

double accuracy(const LogisticModel& model, const LabeledData& data) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < data.size(); ++i)
        ok += model.predict(data.row(i), data.a[i]) == (data.y[i] != 0 ? 1 : 0) ? 1 : 0;
    return static_cast<double>(ok) / static_cast<double>(data.size());
}

LogisticClassifier::LogisticClassifier(LogisticModel model) : model_(std::move(model)) {
    const std::size_t d = model_.center.size();
    w_raw_.assign(d, 0.0);
    b_raw_ = model_.bias;
    for (std::size_t j = 0; j < d; ++j) {
        w_raw_[j] = model_.weights[j] / model_.scale[j];
        b_raw_ -= w_raw_[j] * model_.center[j];
    }
    w_group_ = model_.include_sensitive ? model_.weights.back() : 0.0;
    cut_ = logit_of(model_.threshold);
}

int LogisticClassifier::predict(std::span<const double> x, int a) const {
    double z = simd::dot(w_raw_, x) + b_raw_ + w_group_ * static_cast<double>(a);
    return z >= cut_ ? 1 : 0;
}

void LogisticClassifier::predict_batch(std::span<const double> rows, std::size_t dim,
                                       std::span<const int> groups, std::span<int> out) const {
    Vector scores(out.size());
    simd::active().affine_scores(rows.data(), out.size(), dim, w_raw_.data(), b_raw_, scores.data());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = scores[i] + w_group_ * static_cast<double>(groups[i]) >= cut_ ? 1 : 0;
}

}  // namespace auditlab
