#include <cmath>
#include <cstddef>

#include "kern.h"

namespace sanerf::kern {
namespace {

template <typename T>
void s_vexp(const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::exp(x[i]);
}

template <typename T>
void s_vsin(const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::sin(x[i]);
}

template <typename T>
void s_vcos(const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::cos(x[i]);
}

template <typename T>
void s_vrelu(const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
}

template <typename T>
void s_vsigmoid(const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = T(1) / (T(1) + std::exp(-x[i]));
}

template <typename T>
void s_vsoftplus(const T* x, T* y, std::size_t n) {
  // max(x,0) + log1p(exp(-|x|)): stable for large |x| of either sign
  for (std::size_t i = 0; i < n; ++i) {
    T v = x[i];
    T m = v > T(0) ? v : T(0);
    y[i] = m + std::log1p(std::exp(-std::abs(v)));
  }
}

template <typename T>
void s_vrecip(const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = T(1) / x[i];
}

template <typename T>
void s_vaffine(const T* x, T* y, std::size_t n, T a, T b) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b;
}

template <typename T>
void s_vadd(const T* a, const T* b, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] + b[i];
}

template <typename T>
void s_vsub(const T* a, const T* b, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] - b[i];
}

template <typename T>
void s_vmul(const T* a, const T* b, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * b[i];
}

template <typename T>
void s_acc(T* d, const T* s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) d[i] += s[i];
}

template <typename T>
void s_acc_mul(T* d, const T* a, const T* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) d[i] += a[i] * b[i];
}

template <typename T>
void s_acc_scale(T* d, const T* a, T c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) d[i] += c * a[i];
}

template <typename T>
T s_sum(const T* x, std::size_t n) {
  T s = T(0);
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

template <typename T>
T s_dot(const T* a, const T* b, std::size_t n) {
  T s = T(0);
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

template <typename T>
void s_gemm_nn(std::size_t M, std::size_t N, std::size_t K, const T* A,
               const T* B, T* C, bool acc) {
  for (std::size_t m = 0; m < M; ++m) {
    T* c = C + m * N;
    if (!acc)
      for (std::size_t j = 0; j < N; ++j) c[j] = T(0);
    const T* a = A + m * K;
    for (std::size_t k = 0; k < K; ++k) {
      T av = a[k];
      const T* b = B + k * N;
      for (std::size_t j = 0; j < N; ++j) c[j] += av * b[j];
    }
  }
}

template <typename T>
void s_gemm_nt(std::size_t M, std::size_t N, std::size_t K, const T* A,
               const T* B, T* C, bool acc) {
  for (std::size_t m = 0; m < M; ++m) {
    const T* a = A + m * K;
    for (std::size_t j = 0; j < N; ++j) {
      const T* b = B + j * K;
      T s = T(0);
      for (std::size_t k = 0; k < K; ++k) s += a[k] * b[k];
      C[m * N + j] = acc ? C[m * N + j] + s : s;
    }
  }
}

template <typename T>
void s_gemm_tn(std::size_t M, std::size_t N, std::size_t K, const T* A,
               const T* B, T* C, bool acc) {
  // C[m,j] = sum_k A[k,m] * B[k,j]; iterate k outer so both reads stream rows
  if (!acc)
    for (std::size_t i = 0; i < M * N; ++i) C[i] = T(0);
  for (std::size_t k = 0; k < K; ++k) {
    const T* a = A + k * M;
    const T* b = B + k * N;
    for (std::size_t m = 0; m < M; ++m) {
      T av = a[m];
      T* c = C + m * N;
      for (std::size_t j = 0; j < N; ++j) c[j] += av * b[j];
    }
  }
}

template <typename T>
Table<T> make_scalar_table() {
  Table<T> t;
  t.vexp = s_vexp<T>;
  t.vsin = s_vsin<T>;
  t.vcos = s_vcos<T>;
  t.vrelu = s_vrelu<T>;
  t.vsigmoid = s_vsigmoid<T>;
  t.vsoftplus = s_vsoftplus<T>;
  t.vrecip = s_vrecip<T>;
  t.vaffine = s_vaffine<T>;
  t.vadd = s_vadd<T>;
  t.vsub = s_vsub<T>;
  t.vmul = s_vmul<T>;
  t.acc = s_acc<T>;
  t.acc_mul = s_acc_mul<T>;
  t.acc_scale = s_acc_scale<T>;
  t.sum = s_sum<T>;
  t.dot = s_dot<T>;
  t.gemm_nn = s_gemm_nn<T>;
  t.gemm_nt = s_gemm_nt<T>;
  t.gemm_tn = s_gemm_tn<T>;
  return t;
}

}  // namespace

template <>
const Table<float>& scalar_table<float>() {
  static const Table<float> t = make_scalar_table<float>();
  return t;
}

template <>
const Table<double>& scalar_table<double>() {
  static const Table<double> t = make_scalar_table<double>();
  return t;
}

}  // namespace sanerf::kern
