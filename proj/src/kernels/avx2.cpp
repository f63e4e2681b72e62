#include "nafd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define NAFD_HAVE_X86 1
#include <immintrin.h>
#else
#define NAFD_HAVE_X86 0
#endif

namespace nafd::kernels {

#if NAFD_HAVE_X86
namespace {

#define NAFD_AVX2 __attribute__((target("avx2,fma")))

NAFD_AVX2 double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

NAFD_AVX2 double dot_avx2(const double* a, const double* b, std::size_t n) {
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

NAFD_AVX2 void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

// Two complex numbers per register: [r0 i0 r1 i1].
NAFD_AVX2 cd cdot_avx2(const cd* a, const cd* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    __m256d acc_rr = _mm256_setzero_pd();  // ar*br, ai*bi
    __m256d acc_x = _mm256_setzero_pd();   // ar*bi, ai*br
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        acc_rr = _mm256_fmadd_pd(va, vb, acc_rr);
        acc_x = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0b0101), acc_x);
    }
    alignas(32) double rr[4], x[4];
    _mm256_store_pd(rr, acc_rr);
    _mm256_store_pd(x, acc_x);
    double re = rr[0] + rr[1] + rr[2] + rr[3];
    double im = (x[0] - x[1]) + (x[2] - x[3]);
    for (; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
    }
    return {re, im};
}

NAFD_AVX2 double cnorm2_avx2(const cd* a, std::size_t n) {
    return dot_avx2(reinterpret_cast<const double*>(a), reinterpret_cast<const double*>(a), 2 * n);
}

NAFD_AVX2 void caxpy_avx2(cd alpha, const cd* x, cd* y, std::size_t n) {
    const double* px = reinterpret_cast<const double*>(x);
    double* py = reinterpret_cast<double*>(y);
    const __m256d vr = _mm256_set1_pd(alpha.real());
    const __m256d vi = _mm256_set_pd(alpha.imag(), -alpha.imag(), alpha.imag(), -alpha.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d vx = _mm256_loadu_pd(px + 2 * i);
        __m256d vy = _mm256_loadu_pd(py + 2 * i);
        vy = _mm256_fmadd_pd(vr, vx, vy);
        vy = _mm256_fmadd_pd(vi, _mm256_permute_pd(vx, 0b0101), vy);
        _mm256_storeu_pd(py + 2 * i, vy);
    }
    for (; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] = cd(y[i].real() + alpha.real() * xr - alpha.imag() * xi,
                  y[i].imag() + alpha.real() * xi + alpha.imag() * xr);
    }
}

#undef NAFD_AVX2

}  // namespace

const KernelTable* avx2_table() {
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    static const KernelTable table{dot_avx2, axpy_avx2, cdot_avx2, cnorm2_avx2, caxpy_avx2};
    return supported ? &table : nullptr;
}

#else

const KernelTable* avx2_table() { return nullptr; }

#endif

}  // namespace nafd::kernels
