#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

// Hot inner loops with a portable scalar reference and an AVX2/FMA variant
// picked once at runtime. Complex data is interleaved (re, im) as laid out by
// std::complex<double>.
namespace nafd::kernels {

using cd = std::complex<double>;

enum class Isa { Scalar, Avx2 };

struct KernelTable {
    double (*dot)(const double* a, const double* b, std::size_t n);
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    cd (*cdot)(const cd* a, const cd* b, std::size_t n);  // sum conj(a_i) b_i
    double (*cnorm2)(const cd* a, std::size_t n);
    void (*caxpy)(cd alpha, const cd* x, cd* y, std::size_t n);
};

const KernelTable& scalar_table();
// Null when the binary or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table();

// Active table. NAFD_FORCE_SCALAR=1 in the environment pins the scalar path.
const KernelTable& active();
Isa active_isa();
std::string_view isa_name(Isa isa);

inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { active().axpy(alpha, x, y, n); }
inline cd cdot(const cd* a, const cd* b, std::size_t n) { return active().cdot(a, b, n); }
inline double cnorm2(const cd* a, std::size_t n) { return active().cnorm2(a, n); }
inline void caxpy(cd alpha, const cd* x, cd* y, std::size_t n) { active().caxpy(alpha, x, y, n); }

}  // namespace nafd::kernels
