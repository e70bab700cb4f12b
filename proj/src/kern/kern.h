#pragma once

#include <cstddef>

namespace sanerf::kern {

// Flat compute kernels behind the autodiff ops. Every entry has a scalar
// reference implementation; on x86 the float table (and the arithmetic part
// of the double table) is patched with AVX2+FMA variants at startup when the
// CPU supports them. Scalar and SIMD variants are equivalence-tested against
// each other in tests/test_kernels.cpp.
//
// GEMM conventions (row-major, contiguous rows):
//   gemm_nn: C(M,N) = A(M,K) * B(K,N)            [+= when acc]
//   gemm_nt: C(M,N) = A(M,K) * B(N,K)^T          C[m,n] = sum_k A[m,k]*B[n,k]
//   gemm_tn: C(M,N) = A(K,M)^T * B(K,N)          C[m,n] = sum_k A[k,m]*B[k,n]
template <typename T>
struct Table {
  // elementwise, y may alias x
  void (*vexp)(const T* x, T* y, std::size_t n);
  void (*vsin)(const T* x, T* y, std::size_t n);
  void (*vcos)(const T* x, T* y, std::size_t n);
  void (*vrelu)(const T* x, T* y, std::size_t n);
  void (*vsigmoid)(const T* x, T* y, std::size_t n);
  void (*vsoftplus)(const T* x, T* y, std::size_t n);
  void (*vrecip)(const T* x, T* y, std::size_t n);
  void (*vaffine)(const T* x, T* y, std::size_t n, T a, T b);  // y = a*x + b
  void (*vadd)(const T* a, const T* b, T* y, std::size_t n);
  void (*vsub)(const T* a, const T* b, T* y, std::size_t n);
  void (*vmul)(const T* a, const T* b, T* y, std::size_t n);
  // accumulating forms used by backward passes
  void (*acc)(T* d, const T* s, std::size_t n);                  // d += s
  void (*acc_mul)(T* d, const T* a, const T* b, std::size_t n);  // d += a*b
  void (*acc_scale)(T* d, const T* a, T c, std::size_t n);       // d += c*a
  // reductions
  T (*sum)(const T* x, std::size_t n);
  T (*dot)(const T* a, const T* b, std::size_t n);
  // matrix products
  void (*gemm_nn)(std::size_t M, std::size_t N, std::size_t K, const T* A,
                  const T* B, T* C, bool acc);
  void (*gemm_nt)(std::size_t M, std::size_t N, std::size_t K, const T* A,
                  const T* B, T* C, bool acc);
  void (*gemm_tn)(std::size_t M, std::size_t N, std::size_t K, const T* A,
                  const T* B, T* C, bool acc);
};

template <typename T>
const Table<T>& scalar_table();

// Runtime-selected table (AVX2 when available and not forced off).
template <typename T>
const Table<T>& active_table();

void set_force_scalar(bool force);
bool simd_available();
const char* active_isa();

#if defined(SANERF_HAVE_X86)
// Defined in kern_avx2.cpp (compiled with -mavx2 -mfma).
void install_avx2(Table<float>& f32, Table<double>& f64);
#endif

}  // namespace sanerf::kern
