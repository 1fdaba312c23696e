#include "auditlab/simd/kernels.hpp"

namespace auditlab::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void affine_scores_scalar(const double* rows, std::size_t n, std::size_t dim,
                          const double* w, double bias, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = dot_scalar(rows + i * dim, w, dim) + bias;
}

void accumulate_weighted_rows_scalar(const double* rows, std::size_t n, std::size_t dim,
                                     const double* coeffs, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double c = coeffs[i];
        const double* r = rows + i * dim;
        for (std::size_t j = 0; j < dim; ++j) out[j] += c * r[j];
    }
}

std::size_t count_at_least_scalar(const double* v, std::size_t n, double threshold) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) c += v[i] >= threshold ? 1 : 0;
    return c;
}

const KernelTable kScalar{
    Isa::scalar,
    dot_scalar,
    squared_distance_scalar,
    affine_scores_scalar,
    accumulate_weighted_rows_scalar,
    count_at_least_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace auditlab::simd
