// Compiled with -mavx2 -mfma. Only reached through the dispatch table after a
// runtime CPU check; keep this TU free of inline library code.
#include <immintrin.h>

#include "auditlab/simd/kernels.hpp"

namespace auditlab::simd {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double squared_distance_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// Four rows per step: gather column j of the four rows, fma against w[j].
void affine_scores_avx2(const double* rows, std::size_t n, std::size_t dim,
                        const double* w, double bias, double* out) {
    const long long stride = static_cast<long long>(dim);
    const __m256i idx = _mm256_set_epi64x(3 * stride, 2 * stride, stride, 0);
    const __m256d vb = _mm256_set1_pd(bias);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const double* base = rows + i * dim;
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < dim; ++j) {
            __m256d col = _mm256_i64gather_pd(base + j, idx, 8);
            acc = _mm256_fmadd_pd(col, _mm256_set1_pd(w[j]), acc);
        }
        _mm256_storeu_pd(out + i, _mm256_add_pd(acc, vb));
    }
    for (; i < n; ++i) {
        const double* r = rows + i * dim;
        double s = 0.0;
        for (std::size_t j = 0; j < dim; ++j) s += r[j] * w[j];
        out[i] = s + bias;
    }
}

void accumulate_weighted_rows_avx2(const double* rows, std::size_t n, std::size_t dim,
                                   const double* coeffs, double* out) {
    if (dim < 4) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < dim; ++j) out[j] += coeffs[i] * rows[i * dim + j];
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double* r = rows + i * dim;
        const __m256d c = _mm256_set1_pd(coeffs[i]);
        std::size_t j = 0;
        for (; j + 4 <= dim; j += 4)
            _mm256_storeu_pd(out + j,
                             _mm256_fmadd_pd(c, _mm256_loadu_pd(r + j), _mm256_loadu_pd(out + j)));
        for (; j < dim; ++j) out[j] += coeffs[i] * r[j];
    }
}

std::size_t count_at_least_avx2(const double* v, std::size_t n, double threshold) {
    const __m256d t = _mm256_set1_pd(threshold);
    std::size_t c = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        int mask = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(v + i), t, _CMP_GE_OQ));
        c += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
    }
    for (; i < n; ++i) c += v[i] >= threshold ? 1 : 0;
    return c;
}

const KernelTable kAvx2{
    Isa::avx2,
    dot_avx2,
    squared_distance_avx2,
    affine_scores_avx2,
    accumulate_weighted_rows_avx2,
    count_at_least_avx2,
};

}  // namespace

const KernelTable* avx2_table_unchecked() { return &kAvx2; }

}  // namespace auditlab::simd
