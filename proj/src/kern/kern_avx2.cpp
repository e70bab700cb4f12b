// AVX2 + FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma; nothing here runs unless the dispatcher verified CPU support.
#if defined(SANERF_HAVE_X86)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "kern.h"

namespace sanerf::kern {
namespace {

alignas(32) const std::int32_t kMask32[16] = {-1, -1, -1, -1, -1, -1, -1, -1,
                                              0,  0,  0,  0,  0,  0,  0,  0};
alignas(32) const std::int64_t kMask64[8] = {-1, -1, -1, -1, 0, 0, 0, 0};

template <typename T>
struct VT;

template <>
struct VT<float> {
  using v = __m256;
  static constexpr std::size_t W = 8;
  static v zero() { return _mm256_setzero_ps(); }
  static v set1(float x) { return _mm256_set1_ps(x); }
  static v load(const float* p) { return _mm256_loadu_ps(p); }
  static void store(float* p, v x) { _mm256_storeu_ps(p, x); }
  static v maskload(const float* p, __m256i m) { return _mm256_maskload_ps(p, m); }
  static void maskstore(float* p, __m256i m, v x) { _mm256_maskstore_ps(p, m, x); }
  static v bcast(const float* p) { return _mm256_broadcast_ss(p); }
  static v add(v a, v b) { return _mm256_add_ps(a, b); }
  static v sub(v a, v b) { return _mm256_sub_ps(a, b); }
  static v mul(v a, v b) { return _mm256_mul_ps(a, b); }
  static v div(v a, v b) { return _mm256_div_ps(a, b); }
  static v max(v a, v b) { return _mm256_max_ps(a, b); }
  static v fmadd(v a, v b, v c) { return _mm256_fmadd_ps(a, b, c); }
  static __m256i tail(std::size_t r) {
    return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(kMask32 + 8 - r));
  }
  static float hsum(v x) {
    __m128 lo = _mm256_castps256_ps128(x);
    __m128 hi = _mm256_extractf128_ps(x, 1);
    lo = _mm_add_ps(lo, hi);
    lo = _mm_add_ps(lo, _mm_movehl_ps(lo, lo));
    lo = _mm_add_ss(lo, _mm_shuffle_ps(lo, lo, 0x1));
    return _mm_cvtss_f32(lo);
  }
};

template <>
struct VT<double> {
  using v = __m256d;
  static constexpr std::size_t W = 4;
  static v zero() { return _mm256_setzero_pd(); }
  static v set1(double x) { return _mm256_set1_pd(x); }
  static v load(const double* p) { return _mm256_loadu_pd(p); }
  static void store(double* p, v x) { _mm256_storeu_pd(p, x); }
  static v maskload(const double* p, __m256i m) { return _mm256_maskload_pd(p, m); }
  static void maskstore(double* p, __m256i m, v x) { _mm256_maskstore_pd(p, m, x); }
  static v bcast(const double* p) { return _mm256_broadcast_sd(p); }
  static v add(v a, v b) { return _mm256_add_pd(a, b); }
  static v sub(v a, v b) { return _mm256_sub_pd(a, b); }
  static v mul(v a, v b) { return _mm256_mul_pd(a, b); }
  static v div(v a, v b) { return _mm256_div_pd(a, b); }
  static v max(v a, v b) { return _mm256_max_pd(a, b); }
  static v fmadd(v a, v b, v c) { return _mm256_fmadd_pd(a, b, c); }
  static __m256i tail(std::size_t r) {
    return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(kMask64 + 4 - r));
  }
  static double hsum(v x) {
    __m128d lo = _mm256_castpd256_pd128(x);
    __m128d hi = _mm256_extractf128_pd(x, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
  }
};

// ---------------------------------------------------------------------------
// float transcendentals, Cephes-style polynomial approximations.
// exp saturates outside roughly [-87.3, 88]; the library only evaluates exp
// on non-positive inputs (transmittance, sigmoid/softplus via exp(-|x|)).

__m256 exp256(__m256 x) {
  x = _mm256_min_ps(x, _mm256_set1_ps(88.0f));
  x = _mm256_max_ps(x, _mm256_set1_ps(-87.33654f));
  __m256 fx = _mm256_fmadd_ps(x, _mm256_set1_ps(1.44269504088896341f),
                              _mm256_set1_ps(0.5f));
  fx = _mm256_floor_ps(fx);
  x = _mm256_fnmadd_ps(fx, _mm256_set1_ps(0.693359375f), x);
  x = _mm256_fnmadd_ps(fx, _mm256_set1_ps(-2.12194440e-4f), x);
  __m256 z = _mm256_mul_ps(x, x);
  __m256 y = _mm256_set1_ps(1.9875691500e-4f);
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(1.3981999507e-3f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(8.3334519073e-3f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(4.1665795894e-2f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(1.6666665459e-1f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(5.0000001201e-1f));
  y = _mm256_fmadd_ps(y, z, x);
  y = _mm256_add_ps(y, _mm256_set1_ps(1.0f));
  __m256i n = _mm256_cvttps_epi32(fx);
  n = _mm256_add_epi32(n, _mm256_set1_epi32(127));
  n = _mm256_slli_epi32(n, 23);
  return _mm256_mul_ps(y, _mm256_castsi256_ps(n));
}

// log for inputs > 0; only exercised on (1, 2] by softplus.
__m256 log256(__m256 x) {
  x = _mm256_max_ps(x, _mm256_set1_ps(1.17549435e-38f));
  __m256i xi = _mm256_castps_si256(x);
  __m256i e_i = _mm256_sub_epi32(_mm256_srli_epi32(xi, 23), _mm256_set1_epi32(0x7e));
  xi = _mm256_and_si256(xi, _mm256_set1_epi32(0x007fffff));
  xi = _mm256_or_si256(xi, _mm256_castps_si256(_mm256_set1_ps(0.5f)));
  x = _mm256_castsi256_ps(xi);  // mantissa in [0.5, 1)
  __m256 e = _mm256_cvtepi32_ps(e_i);
  __m256 lt = _mm256_cmp_ps(x, _mm256_set1_ps(0.707106781186547524f), _CMP_LT_OQ);
  __m256 one = _mm256_set1_ps(1.0f);
  x = _mm256_add_ps(_mm256_sub_ps(x, one), _mm256_and_ps(lt, x));
  e = _mm256_sub_ps(e, _mm256_and_ps(lt, one));
  __m256 z = _mm256_mul_ps(x, x);
  __m256 y = _mm256_set1_ps(7.0376836292e-2f);
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(-1.1514610310e-1f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(1.1676998740e-1f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(-1.2420140846e-1f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(1.4249322787e-1f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(-1.6668057665e-1f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(2.0000714765e-1f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(-2.4999993993e-1f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(3.3333331174e-1f));
  y = _mm256_mul_ps(_mm256_mul_ps(y, x), z);
  y = _mm256_fmadd_ps(e, _mm256_set1_ps(-2.12194440e-4f), y);
  y = _mm256_fnmadd_ps(z, _mm256_set1_ps(0.5f), y);
  x = _mm256_add_ps(x, y);
  return _mm256_fmadd_ps(e, _mm256_set1_ps(0.693359375f), x);
}

// sin/cos with pi/4 extended-precision argument reduction; usable for the
// positional-encoding range (|x| up to a few 1e4) at ~1e-6 absolute error.
__m256 sincos256(__m256 x, bool want_cos) {
  const __m256 sign_mask = _mm256_set1_ps(-0.0f);
  __m256 sign_bit = want_cos ? _mm256_setzero_ps() : _mm256_and_ps(x, sign_mask);
  x = _mm256_andnot_ps(sign_mask, x);
  __m256 y = _mm256_mul_ps(x, _mm256_set1_ps(1.27323954473516f));  // 4/pi
  __m256i j = _mm256_cvttps_epi32(y);
  j = _mm256_add_epi32(j, _mm256_set1_epi32(1));
  j = _mm256_and_si256(j, _mm256_set1_epi32(~1));
  y = _mm256_cvtepi32_ps(j);
  __m256i quad = j;
  if (want_cos) quad = _mm256_sub_epi32(quad, _mm256_set1_epi32(2));
  __m256i four = _mm256_set1_epi32(4);
  __m256i sw = want_cos ? _mm256_andnot_si256(quad, four)
                        : _mm256_and_si256(quad, four);
  sign_bit = _mm256_xor_ps(sign_bit, _mm256_castsi256_ps(_mm256_slli_epi32(sw, 29)));
  __m256 poly_mask = _mm256_castsi256_ps(_mm256_cmpeq_epi32(
      _mm256_and_si256(quad, _mm256_set1_epi32(2)), _mm256_setzero_si256()));
  x = _mm256_fnmadd_ps(y, _mm256_set1_ps(0.78515625f), x);
  x = _mm256_fnmadd_ps(y, _mm256_set1_ps(2.4187564849853515625e-4f), x);
  x = _mm256_fnmadd_ps(y, _mm256_set1_ps(3.77489497744594108e-8f), x);
  __m256 z = _mm256_mul_ps(x, x);
  __m256 yc = _mm256_set1_ps(2.443315711809948e-5f);
  yc = _mm256_fmadd_ps(yc, z, _mm256_set1_ps(-1.388731625493765e-3f));
  yc = _mm256_fmadd_ps(yc, z, _mm256_set1_ps(4.166664568298827e-2f));
  yc = _mm256_mul_ps(yc, _mm256_mul_ps(z, z));
  yc = _mm256_fnmadd_ps(z, _mm256_set1_ps(0.5f), yc);
  yc = _mm256_add_ps(yc, _mm256_set1_ps(1.0f));
  __m256 ys = _mm256_set1_ps(-1.9515295891e-4f);
  ys = _mm256_fmadd_ps(ys, z, _mm256_set1_ps(8.3321608736e-3f));
  ys = _mm256_fmadd_ps(ys, z, _mm256_set1_ps(-1.6666654611e-1f));
  ys = _mm256_fmadd_ps(_mm256_mul_ps(ys, z), x, x);
  __m256 r = _mm256_blendv_ps(yc, ys, poly_mask);
  return _mm256_xor_ps(r, sign_bit);
}

// ---------------------------------------------------------------------------
// elementwise drivers (masked tails; masked lanes load as 0, stores suppressed)

template <typename T, class F>
inline void map1(const T* x, T* y, std::size_t n, F f) {
  using V = VT<T>;
  std::size_t i = 0;
  for (; i + V::W <= n; i += V::W) V::store(y + i, f(V::load(x + i)));
  if (i < n) {
    __m256i m = V::tail(n - i);
    V::maskstore(y + i, m, f(V::maskload(x + i, m)));
  }
}

template <typename T, class F>
inline void map2(const T* a, const T* b, T* y, std::size_t n, F f) {
  using V = VT<T>;
  std::size_t i = 0;
  for (; i + V::W <= n; i += V::W) V::store(y + i, f(V::load(a + i), V::load(b + i)));
  if (i < n) {
    __m256i m = V::tail(n - i);
    V::maskstore(y + i, m, f(V::maskload(a + i, m), V::maskload(b + i, m)));
  }
}

template <typename T>
void a_vadd(const T* a, const T* b, T* y, std::size_t n) {
  map2<T>(a, b, y, n, [](auto x, auto z) { return VT<T>::add(x, z); });
}
template <typename T>
void a_vsub(const T* a, const T* b, T* y, std::size_t n) {
  map2<T>(a, b, y, n, [](auto x, auto z) { return VT<T>::sub(x, z); });
}
template <typename T>
void a_vmul(const T* a, const T* b, T* y, std::size_t n) {
  map2<T>(a, b, y, n, [](auto x, auto z) { return VT<T>::mul(x, z); });
}
template <typename T>
void a_vrelu(const T* x, T* y, std::size_t n) {
  map1<T>(x, y, n, [](auto v) { return VT<T>::max(v, VT<T>::zero()); });
}
template <typename T>
void a_vrecip(const T* x, T* y, std::size_t n) {
  map1<T>(x, y, n, [](auto v) { return VT<T>::div(VT<T>::set1(T(1)), v); });
}

template <typename T>
void a_vaffine(const T* x, T* y, std::size_t n, T a, T b) {
  using V = VT<T>;
  auto va = V::set1(a);
  auto vb = V::set1(b);
  std::size_t i = 0;
  for (; i + V::W <= n; i += V::W) V::store(y + i, V::fmadd(va, V::load(x + i), vb));
  if (i < n) {
    __m256i m = V::tail(n - i);
    V::maskstore(y + i, m, V::fmadd(va, V::maskload(x + i, m), vb));
  }
}

template <typename T>
void a_acc(T* d, const T* s, std::size_t n) {
  map2<T>(d, s, d, n, [](auto x, auto z) { return VT<T>::add(x, z); });
}

template <typename T>
void a_acc_mul(T* d, const T* a, const T* b, std::size_t n) {
  using V = VT<T>;
  std::size_t i = 0;
  for (; i + V::W <= n; i += V::W)
    V::store(d + i, V::fmadd(V::load(a + i), V::load(b + i), V::load(d + i)));
  if (i < n) {
    __m256i m = V::tail(n - i);
    V::maskstore(d + i, m,
                 V::fmadd(V::maskload(a + i, m), V::maskload(b + i, m),
                          V::maskload(d + i, m)));
  }
}

template <typename T>
void a_acc_scale(T* d, const T* a, T c, std::size_t n) {
  using V = VT<T>;
  auto vc = V::set1(c);
  std::size_t i = 0;
  for (; i + V::W <= n; i += V::W)
    V::store(d + i, V::fmadd(vc, V::load(a + i), V::load(d + i)));
  if (i < n) {
    __m256i m = V::tail(n - i);
    V::maskstore(d + i, m, V::fmadd(vc, V::maskload(a + i, m), V::maskload(d + i, m)));
  }
}

template <typename T>
T a_sum(const T* x, std::size_t n) {
  using V = VT<T>;
  auto s = V::zero();
  std::size_t i = 0;
  for (; i + V::W <= n; i += V::W) s = V::add(s, V::load(x + i));
  if (i < n) s = V::add(s, V::maskload(x + i, V::tail(n - i)));
  return V::hsum(s);
}

template <typename T>
T a_dot(const T* a, const T* b, std::size_t n) {
  using V = VT<T>;
  auto s = V::zero();
  std::size_t i = 0;
  for (; i + V::W <= n; i += V::W) s = V::fmadd(V::load(a + i), V::load(b + i), s);
  if (i < n) {
    __m256i m = V::tail(n - i);
    s = V::fmadd(V::maskload(a + i, m), V::maskload(b + i, m), s);
  }
  return V::hsum(s);
}

void a_vexp_f(const float* x, float* y, std::size_t n) {
  map1<float>(x, y, n, [](__m256 v) { return exp256(v); });
}
void a_vsin_f(const float* x, float* y, std::size_t n) {
  map1<float>(x, y, n, [](__m256 v) { return sincos256(v, false); });
}
void a_vcos_f(const float* x, float* y, std::size_t n) {
  map1<float>(x, y, n, [](__m256 v) { return sincos256(v, true); });
}
void a_vsigmoid_f(const float* x, float* y, std::size_t n) {
  map1<float>(x, y, n, [](__m256 v) {
    __m256 one = _mm256_set1_ps(1.0f);
    __m256 e = exp256(_mm256_xor_ps(v, _mm256_set1_ps(-0.0f)));
    return _mm256_div_ps(one, _mm256_add_ps(one, e));
  });
}
void a_vsoftplus_f(const float* x, float* y, std::size_t n) {
  // max(x,0) + log(1 + exp(-|x|))
  map1<float>(x, y, n, [](__m256 v) {
    __m256 sign = _mm256_set1_ps(-0.0f);
    __m256 ax = _mm256_andnot_ps(sign, v);
    __m256 e = exp256(_mm256_xor_ps(ax, sign));
    __m256 l = log256(_mm256_add_ps(_mm256_set1_ps(1.0f), e));
    return _mm256_add_ps(_mm256_max_ps(v, _mm256_setzero_ps()), l);
  });
}

// ---------------------------------------------------------------------------
// GEMM. Register tiles of R rows x S vectors, broadcast-A times row-of-B FMA.
// The A element for (row r, step k) sits at A[r*a_r + k*a_k], which covers
// both the nn kernel (a_r = lda, a_k = 1) and the tn kernel (a_r = 1, a_k = M).

template <typename T, int R, int S, bool Mask>
inline void mm_tile(const T* A, std::size_t a_r, std::size_t a_k, std::size_t K,
                    const T* Bj, std::size_t ldb, T* Cj, std::size_t ldc,
                    bool acc, __m256i mask) {
  using V = VT<T>;
  typename V::v c[R][S];
  for (int r = 0; r < R; ++r)
    for (int s = 0; s < S; ++s) {
      T* p = Cj + r * ldc + s * V::W;
      c[r][s] = acc ? (Mask ? V::maskload(p, mask) : V::load(p)) : V::zero();
    }
  for (std::size_t k = 0; k < K; ++k) {
    typename V::v b[S];
    for (int s = 0; s < S; ++s) {
      const T* p = Bj + k * ldb + s * V::W;
      b[s] = Mask ? V::maskload(p, mask) : V::load(p);
    }
    for (int r = 0; r < R; ++r) {
      auto a = V::bcast(A + r * a_r + k * a_k);
      for (int s = 0; s < S; ++s) c[r][s] = V::fmadd(a, b[s], c[r][s]);
    }
  }
  for (int r = 0; r < R; ++r)
    for (int s = 0; s < S; ++s) {
      T* p = Cj + r * ldc + s * V::W;
      if (Mask)
        V::maskstore(p, mask, c[r][s]);
      else
        V::store(p, c[r][s]);
    }
}

template <typename T, int R>
void mm_rows(std::size_t N, std::size_t K, const T* A, std::size_t a_r,
             std::size_t a_k, const T* B, std::size_t ldb, T* C,
             std::size_t ldc, bool acc) {
  using V = VT<T>;
  const __m256i none = _mm256_setzero_si256();
  std::size_t j = 0;
  for (; j + 2 * V::W <= N; j += 2 * V::W)
    mm_tile<T, R, 2, false>(A, a_r, a_k, K, B + j, ldb, C + j, ldc, acc, none);
  for (; j + V::W <= N; j += V::W)
    mm_tile<T, R, 1, false>(A, a_r, a_k, K, B + j, ldb, C + j, ldc, acc, none);
  if (j < N)
    mm_tile<T, R, 1, true>(A, a_r, a_k, K, B + j, ldb, C + j, ldc, acc,
                           V::tail(N - j));
}

template <typename T>
void a_gemm_nn(std::size_t M, std::size_t N, std::size_t K, const T* A,
               const T* B, T* C, bool acc) {
  std::size_t m = 0;
  for (; m + 4 <= M; m += 4)
    mm_rows<T, 4>(N, K, A + m * K, K, 1, B, N, C + m * N, N, acc);
  for (; m < M; ++m)
    mm_rows<T, 1>(N, K, A + m * K, K, 1, B, N, C + m * N, N, acc);
}

template <typename T>
void a_gemm_tn(std::size_t M, std::size_t N, std::size_t K, const T* A,
               const T* B, T* C, bool acc) {
  // K is the long (reduction) axis here; block it so the A/B slabs a tile
  // re-reads stay in L2.
  const std::size_t KB = 512;
  for (std::size_t k0 = 0; k0 < K; k0 += KB) {
    std::size_t kb = std::min(KB, K - k0);
    bool a = acc || k0 > 0;
    const T* Ab = A + k0 * M;
    const T* Bb = B + k0 * N;
    std::size_t m = 0;
    for (; m + 4 <= M; m += 4)
      mm_rows<T, 4>(N, kb, Ab + m, 1, M, Bb, N, C + m * N, N, a);
    for (; m < M; ++m)
      mm_rows<T, 1>(N, kb, Ab + m, 1, M, Bb, N, C + m * N, N, a);
  }
}

// nt: C[m,j] = sum_k A[m,k]*B[j,k], both contiguous along k -> dot-product
// tiles of R rows x Cn columns with a horizontal reduction at the end.
template <typename T, int R, int Cn>
inline void nt_tile(const T* A, std::size_t lda, std::size_t K, const T* Bj,
                    std::size_t ldb, T* Cj, std::size_t ldc, bool acc) {
  using V = VT<T>;
  typename V::v s[R][Cn];
  for (int r = 0; r < R; ++r)
    for (int c = 0; c < Cn; ++c) s[r][c] = V::zero();
  std::size_t k = 0;
  for (; k + V::W <= K; k += V::W) {
    typename V::v a[R];
    for (int r = 0; r < R; ++r) a[r] = V::load(A + r * lda + k);
    for (int c = 0; c < Cn; ++c) {
      auto b = V::load(Bj + c * ldb + k);
      for (int r = 0; r < R; ++r) s[r][c] = V::fmadd(a[r], b, s[r][c]);
    }
  }
  if (k < K) {
    __m256i m = V::tail(K - k);
    typename V::v a[R];
    for (int r = 0; r < R; ++r) a[r] = V::maskload(A + r * lda + k, m);
    for (int c = 0; c < Cn; ++c) {
      auto b = V::maskload(Bj + c * ldb + k, m);
      for (int r = 0; r < R; ++r) s[r][c] = V::fmadd(a[r], b, s[r][c]);
    }
  }
  for (int r = 0; r < R; ++r)
    for (int c = 0; c < Cn; ++c) {
      T v = V::hsum(s[r][c]);
      T* p = Cj + r * ldc + c;
      *p = acc ? *p + v : v;
    }
}

template <typename T, int R>
void nt_rows(std::size_t N, std::size_t K, const T* A, const T* B, T* C,
             std::size_t ldc, bool acc) {
  std::size_t j = 0;
  for (; j + 4 <= N; j += 4)
    nt_tile<T, R, 4>(A, K, K, B + j * K, K, C + j, ldc, acc);
  for (; j < N; ++j) nt_tile<T, R, 1>(A, K, K, B + j * K, K, C + j, ldc, acc);
}

template <typename T>
void a_gemm_nt(std::size_t M, std::size_t N, std::size_t K, const T* A,
               const T* B, T* C, bool acc) {
  std::size_t m = 0;
  for (; m + 2 <= M; m += 2) nt_rows<T, 2>(N, K, A + m * K, B, C + m * N, N, acc);
  for (; m < M; ++m) nt_rows<T, 1>(N, K, A + m * K, B, C + m * N, N, acc);
}

}  // namespace

void install_avx2(Table<float>& f32, Table<double>& f64) {
  f32.vexp = a_vexp_f;
  f32.vsin = a_vsin_f;
  f32.vcos = a_vcos_f;
  f32.vrelu = a_vrelu<float>;
  f32.vsigmoid = a_vsigmoid_f;
  f32.vsoftplus = a_vsoftplus_f;
  f32.vrecip = a_vrecip<float>;
  f32.vaffine = a_vaffine<float>;
  f32.vadd = a_vadd<float>;
  f32.vsub = a_vsub<float>;
  f32.vmul = a_vmul<float>;
  f32.acc = a_acc<float>;
  f32.acc_mul = a_acc_mul<float>;
  f32.acc_scale = a_acc_scale<float>;
  f32.sum = a_sum<float>;
  f32.dot = a_dot<float>;
  f32.gemm_nn = a_gemm_nn<float>;
  f32.gemm_nt = a_gemm_nt<float>;
  f32.gemm_tn = a_gemm_tn<float>;

  // double: vectorize the arithmetic; transcendentals stay on libm so the
  // float64 gradient-check path is bit-identical to the scalar reference.
  f64.vrelu = a_vrelu<double>;
  f64.vrecip = a_vrecip<double>;
  f64.vaffine = a_vaffine<double>;
  f64.vadd = a_vadd<double>;
  f64.vsub = a_vsub<double>;
  f64.vmul = a_vmul<double>;
  f64.acc = a_acc<double>;
  f64.acc_mul = a_acc_mul<double>;
  f64.acc_scale = a_acc_scale<double>;
  f64.sum = a_sum<double>;
  f64.dot = a_dot<double>;
  f64.gemm_nn = a_gemm_nn<double>;
  f64.gemm_nt = a_gemm_nt<double>;
  f64.gemm_tn = a_gemm_tn<double>;
}

}  // namespace sanerf::kern

#endif  // SANERF_HAVE_X86
