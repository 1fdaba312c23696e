// AArch64 only; NEON is part of the base ISA there so no runtime check.
#include <arm_neon.h>

#include "auditlab/simd/kernels.hpp"

namespace auditlab::simd {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double squared_distance_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        acc = vfmaq_f64(acc, d, d);
    }
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void affine_scores_neon(const double* rows, std::size_t n, std::size_t dim,
                        const double* w, double bias, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = dot_neon(rows + i * dim, w, dim) + bias;
}

void accumulate_weighted_rows_neon(const double* rows, std::size_t n, std::size_t dim,
                                   const double* coeffs, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* r = rows + i * dim;
        const float64x2_t c = vdupq_n_f64(coeffs[i]);
        std::size_t j = 0;
        for (; j + 2 <= dim; j += 2)
            vst1q_f64(out + j, vfmaq_f64(vld1q_f64(out + j), c, vld1q_f64(r + j)));
        for (; j < dim; ++j) out[j] += coeffs[i] * r[j];
    }
}

std::size_t count_at_least_neon(const double* v, std::size_t n, double threshold) {
    const float64x2_t t = vdupq_n_f64(threshold);
    std::size_t c = 0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        uint64x2_t ge = vcgeq_f64(vld1q_f64(v + i), t);
        c += (vgetq_lane_u64(ge, 0) & 1) + (vgetq_lane_u64(ge, 1) & 1);
    }
    for (; i < n; ++i) c += v[i] >= threshold ? 1 : 0;
    return c;
}

const KernelTable kNeon{
    Isa::neon,
    dot_neon,
    squared_distance_neon,
    affine_scores_neon,
    accumulate_weighted_rows_neon,
    count_at_least_neon,
};

}  // namespace

const KernelTable* neon_table_unchecked() { return &kNeon; }

}  // namespace auditlab::simd
