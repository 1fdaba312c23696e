#pragma once

#include <cstddef>
#include <span>

namespace auditlab::simd {

enum class Isa { scalar, avx2, neon };

const char* isa_name(Isa isa);

// Dense row-major batches: `rows` holds n rows of `dim` doubles.
struct KernelTable {
    Isa isa;
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*squared_distance)(const double* a, const double* b, std::size_t n);
    // out[i] = w . row_i + bias
    void (*affine_scores)(const double* rows, std::size_t n, std::size_t dim,
                          const double* w, double bias, double* out);
    // out[j] += sum_i coeffs[i] * row_i[j]
    void (*accumulate_weighted_rows)(const double* rows, std::size_t n, std::size_t dim,
                                     const double* coeffs, double* out);
    // number of i with v[i] >= threshold
    std::size_t (*count_at_least)(const double* v, std::size_t n, double threshold);
};

const KernelTable& scalar_kernels();
// nullptr when the variant is not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

bool isa_available(Isa isa);

// Best available table unless overridden by set_active_isa or the
// AUDITLAB_FORCE_SCALAR environment variable.
const KernelTable& active();

// Throws DomainError if the ISA is unavailable on this machine.
void set_active_isa(Isa isa);
void reset_active_isa();

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    return active().squared_distance(a.data(), b.data(), a.size());
}

inline void affine_scores(std::span<const double> rows, std::size_t dim,
                          std::span<const double> w, double bias, std::span<double> out) {
    active().affine_scores(rows.data(), out.size(), dim, w.data(), bias, out.data());
}

inline void accumulate_weighted_rows(std::span<const double> rows, std::size_t dim,
                                     std::span<const double> coeffs, std::span<double> out) {
    active().accumulate_weighted_rows(rows.data(), coeffs.size(), dim, coeffs.data(), out.data());
}

inline std::size_t count_at_least(std::span<const double> v, double threshold) {
    return active().count_at_least(v.data(), v.size(), threshold);
}

}  // namespace auditlab::simd
