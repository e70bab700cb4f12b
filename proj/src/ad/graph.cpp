#include "ad/graph.h"

#include <algorithm>
#include <cstring>

#include "core/threadpool.h"
#include "kern/kern.h"

namespace sanerf::ad {
namespace {

// conv2d uses ceil-mode 'same' padding: out = ceil(in/stride), with the total
// pad split floor-front / rest-back
struct ConvGeom {
  int H, W, C, k, stride, Ho, Wo, pt, pl;
};

ConvGeom conv_geom(int H, int W, int C, int k, int stride) {
  ConvGeom g;
  g.H = H, g.W = W, g.C = C, g.k = k, g.stride = stride;
  g.Ho = (H + stride - 1) / stride;
  g.Wo = (W + stride - 1) / stride;
  int ph = std::max(0, (g.Ho - 1) * stride + k - H);
  int pw = std::max(0, (g.Wo - 1) * stride + k - W);
  g.pt = ph / 2;
  g.pl = pw / 2;
  return g;
}

template <typename T>
void im2col(const ConvGeom& g, const T* x, T* xc) {
  const int kk = g.k * g.k;
  for (int oy = 0; oy < g.Ho; ++oy)
    for (int ox = 0; ox < g.Wo; ++ox) {
      T* row = xc + (std::size_t(oy) * g.Wo + ox) * kk * g.C;
      for (int ky = 0; ky < g.k; ++ky)
        for (int kx = 0; kx < g.k; ++kx) {
          int iy = oy * g.stride - g.pt + ky;
          int ix = ox * g.stride - g.pl + kx;
          T* dst = row + (ky * g.k + kx) * g.C;
          if (iy >= 0 && iy < g.H && ix >= 0 && ix < g.W)
            std::memcpy(dst, x + (std::size_t(iy) * g.W + ix) * g.C,
                        sizeof(T) * g.C);
          else
            std::memset(dst, 0, sizeof(T) * g.C);
        }
    }
}

template <typename T>
void col2im_add(const ConvGeom& g, const T* xc, T* dx) {
  const auto& t = kern::active_table<T>();
  const int kk = g.k * g.k;
  for (int oy = 0; oy < g.Ho; ++oy)
    for (int ox = 0; ox < g.Wo; ++ox) {
      const T* row = xc + (std::size_t(oy) * g.Wo + ox) * kk * g.C;
      for (int ky = 0; ky < g.k; ++ky)
        for (int kx = 0; kx < g.k; ++kx) {
          int iy = oy * g.stride - g.pt + ky;
          int ix = ox * g.stride - g.pl + kx;
          if (iy >= 0 && iy < g.H && ix >= 0 && ix < g.W)
            t.acc(dx + (std::size_t(iy) * g.W + ix) * g.C,
                  row + (ky * g.k + kx) * g.C, g.C);
        }
    }
}

// d = s / d += s, picked by `fresh` (first touch of a grad_out buffer)
template <typename T>
void acc_or_copy(const kern::Table<T>& t, T* d, const T* s, std::size_t n,
                 bool fresh) {
  if (fresh)
    std::memcpy(d, s, sizeof(T) * n);
  else
    t.acc(d, s, n);
}

template <typename T>
void acc_or_mul(const kern::Table<T>& t, T* d, const T* a, const T* b,
                std::size_t n, bool fresh) {
  if (fresh)
    t.vmul(a, b, d, n);
  else
    t.acc_mul(d, a, b, n);
}

template <typename T>
void acc_or_scale(const kern::Table<T>& t, T* d, const T* a, T c,
                  std::size_t n, bool fresh) {
  if (fresh)
    t.vaffine(a, d, n, c, T(0));
  else
    t.acc_scale(d, a, c, n);
}

// per-thread scratch for op temporaries (one live use at a time each)
template <typename T>
Buf<T>& scratch() {
  static thread_local Buf<T> b;
  return b;
}

template <typename T>
Buf<T>& scratch2() {
  static thread_local Buf<T> b;
  return b;
}

// b (rows,cols) row-major -> bt (cols,rows). The nn GEMM runs roughly twice
// as fast as the nt variant, so transposing the small operand and calling nn
// wins whenever the other operand is a big batch.
template <typename T>
void transpose_into(const T* b, std::size_t rows, std::size_t cols, T* bt) {
  constexpr std::size_t BL = 32;
  for (std::size_t r0 = 0; r0 < rows; r0 += BL)
    for (std::size_t c0 = 0; c0 < cols; c0 += BL) {
      std::size_t r1 = std::min(rows, r0 + BL), c1 = std::min(cols, c0 + BL);
      for (std::size_t r = r0; r < r1; ++r)
        for (std::size_t c = c0; c < c1; ++c)
          bt[c * rows + r] = b[r * cols + c];
    }
}

}  // namespace

template <typename T>
typename Graph<T>::Ref Graph<T>::push(Node<T> n) {
  nodes_.push_back(std::move(n));
  return int(nodes_.size()) - 1;
}

template <typename T>
typename Graph<T>::Ref Graph<T>::constant(Shape s, const T* data) {
  Node<T> n;
  n.shape = s;
  n.val.assign(data, data + s.numel());
  return push(std::move(n));
}

template <typename T>
typename Graph<T>::Ref Graph<T>::scalar(T v) {
  return constant({1, 1}, &v);
}

template <typename T>
typename Graph<T>::Ref Graph<T>::param(const std::string& name, Shape s,
                                       const T* data) {
  if (auto it = param_by_name_.find(name); it != param_by_name_.end()) {
    SANERF_SHAPE_CHECK(nodes_[it->second].shape == s, "param '", name,
                       "' re-registered with a different shape");
    return it->second;
  }
  Node<T> n;
  n.shape = s;
  n.val.assign(data, data + s.numel());
  n.requires_grad = true;
  Ref r = push(std::move(n));
  param_refs_.emplace_back(name, r);
  param_by_name_[name] = r;
  return r;
}

template <typename T>
typename Graph<T>::Ref Graph<T>::add(Ref a, Ref b) {
  auto &na = at(a), &nb = at(b);
  SANERF_SHAPE_CHECK(na.shape == nb.shape, "add: shape mismatch");
  Node<T> n;
  n.op = Op::kAdd, n.a = a, n.b = b, n.shape = na.shape;
  n.requires_grad = na.requires_grad || nb.requires_grad;
  n.val.resize(n.shape.numel());
  kern::active_table<T>().vadd(na.val.data(), nb.val.data(), n.val.data(),
                               n.val.size());
  return push(std::move(n));
}

template <typename T>
typename Graph<T>::Ref Graph<T>::sub(Ref a, Ref b) {
  auto &na = at(a), &nb = at(b);
  SANERF_SHAPE_CHECK(na.shape == nb.shape, "sub: shape mismatch");
  Node<T> n;
  n.op = Op::kSub, n.a = a, n.b = b, n.shape = na.shape;
  n.requires_grad = na.requires_grad || nb.requires_grad;
  n.val.resize(n.shape.numel());
  kern::active_table<T>().vsub(na.val.data(), nb.val.data(), n.val.data(),
                               n.val.size());
  return push(std::move(n));
}

template <typename T>
typename Graph<T>::Ref Graph<T>::mul(Ref a, Ref b) {
  auto &na = at(a), &nb = at(b);
  SANERF_SHAPE_CHECK(na.shape == nb.shape, "mul: shape mismatch");
  Node<T> n;
  n.op = Op::kMul, n.a = a, n.b = b, n.shape = na.shape;
  n.requires_grad = na.requires_grad || nb.requires_grad;
  n.val.resize(n.shape.numel());
  kern::active_table<T>().vmul(na.val.data(), nb.val.data(), n.val.data(),
                               n.val.size());
  return push(std::move(n));
}

template <typename T>
typename Graph<T>::Ref Graph<T>::add_rowvec(Ref a, Ref b) {
  auto &na = at(a), &nb = at(b);
  SANERF_SHAPE_CHECK(nb.shape.rows == 1 && nb.shape.cols == na.shape.cols,
                     "add_rowvec: want (1,", na.shape.cols, "), got (",
                     nb.shape.rows, ",", nb.shape.cols, ")");
  Node<T> n;
  n.op = Op::kAddRowVec, n.a = a, n.b = b, n.shape = na.shape;
  n.requires_grad = na.requires_grad || nb.requires_grad;
  n.val.resize(n.shape.numel());
  const auto& t = kern::active_table<T>();
  std::size_t C = n.shape.cols;
  for (std::size_t r = 0; r < n.shape.rows; ++r)
    t.vadd(na.val.data() + r * C, nb.val.data(), n.val.data() + r * C, C);
  return push(std::move(n));
}

template <typename T>
typename Graph<T>::Ref Graph<T>::mul_colvec(Ref a, Ref b) {
  auto &na = at(a), &nb = at(b);
  SANERF_SHAPE_CHECK(nb.shape.cols == 1 && nb.shape.rows == na.shape.rows,
                     "mul_colvec: want (", na.shape.rows, ",1), got (",
                     nb.shape.rows, ",", nb.shape.cols, ")");
  Node<T> n;
  n.op = Op::kMulColVec, n.a = a, n.b = b, n.shape = na.shape;
  n.requires_grad = na.requires_grad || nb.requires_grad;
  n.val.resize(n.shape.numel());
  const auto& t = kern::active_table<T>();
  std::size_t C = n.shape.cols;
  for (std::size_t r = 0; r < n.shape.rows; ++r)
    t.vaffine(na.val.data() + r * C, n.val.data() + r * C, C, nb.val[r], T(0));
  return push(std::move(n));
}

template <typename T>
typename Graph<T>::Ref Graph<T>::affine(Ref a, T scale, T offset) {
  auto& na = at(a);
  Node<T> n;
  n.op = Op::kAffine, n.a = a, n.shape = na.shape;
  n.s0 = scale, n.s1 = offset;
  n.requires_grad = na.requires_grad;
  n.val.resize(n.shape.numel());
  kern::active_table<T>().vaffine(na.val.data(), n.val.data(), n.val.size(),
                                  scale, offset);
  return push(std::move(n));
}

template <typename T>
typename Graph<T>::Ref Graph<T>::matmul(Ref a, Ref b) {
  auto &na = at(a), &nb = at(b);
  SANERF_SHAPE_CHECK(na.shape.cols == nb.shape.rows, "matmul: (", na.shape.rows,
                     ",", na.shape.cols, ") x (", nb.shape.rows, ",",
                     nb.shape.cols, ")");
  Node<T> n;
  n.op = Op::kMatMul, n.a = a, n.b = b;
  n.shape = {na.shape.rows, nb.shape.cols};
  n.requires_grad = na.requires_grad || nb.requires_grad;
  n.val.resize(n.shape.numel());
  const auto& t = kern::active_table<T>();
  std::size_t M = n.shape.rows, N = n.shape.cols, K = na.shape.cols;
  const T* A = na.val.data();
  const T* B = nb.val.data();
  T* C = n.val.data();
  if (M >= 256 && num_threads() > 1) {
    parallel_for(M, [&](std::size_t m0, std::size_t m1) {
      t.gemm_nn(m1 - m0, N, K, A + m0 * K, B, C + m0 * N, false);
    });
  } else {
    t.gemm_nn(M, N, K, A, B, C, false);
  }
  return push(std::move(n));
}

#define SANERF_UNARY(NAME, OPK, KERNEL)                                   \
  template <typename T>                                                   \
  typename Graph<T>::Ref Graph<T>::NAME(Ref a) {                          \
    auto& na = at(a);                                                     \
    Node<T> n;                                                            \
    n.op = Op::OPK, n.a = a, n.shape = na.shape;                          \
    n.requires_grad = na.requires_grad;                                   \
    n.val.resize(n.shape.numel());                                        \
    kern::active_table<T>().KERNEL(na.val.data(), n.val.data(),           \
                                   n.val.size());                         \
    return push(std::move(n));                                            \
  }

SANERF_UNARY(exp, kExp, vexp)
SANERF_UNARY(sin, kSin, vsin)
SANERF_UNARY(cos, kCos, vcos)
SANERF_UNARY(relu, kRelu, vrelu)
SANERF_UNARY(sigmoid, kSigmoid, vsigmoid)
SANERF_UNARY(softplus, kSoftplus, vsoftplus)
SANERF_UNARY(recip, kRecip, vrecip)
#undef SANERF_UNARY

template <typename T>
typename Graph<T>::Ref Graph<T>::sum(Ref a) {
  auto& na = at(a);
  Node<T> n;
  n.op = Op::kSum, n.a = a, n.shape = {1, 1};
  n.requires_grad = na.requires_grad;
  n.val.assign(std::size_t(1),
               kern::active_table<T>().sum(na.val.data(), na.val.size()));
  return push(std::move(n));
}

template <typename T>
typename Graph<T>::Ref Graph<T>::row_sum(Ref a) {
  auto& na = at(a);
  Node<T> n;
  n.op = Op::kRowSum, n.a = a, n.shape = {na.shape.rows, 1};
  n.requires_grad = na.requires_grad;
  n.val.resize(na.shape.rows);
  const auto& t = kern::active_table<T>();
  for (std::size_t r = 0; r < na.shape.rows; ++r)
    n.val[r] = t.sum(na.val.data() + r * na.shape.cols, na.shape.cols);
  return push(std::move(n));
}

template <typename T>
typename Graph<T>::Ref Graph<T>::mean_rows(Ref a) {
  auto& na = at(a);
  Node<T> n;
  n.op = Op::kMeanRows, n.a = a, n.shape = {1, na.shape.cols};
  n.requires_grad = na.requires_grad;
  n.val.assign(na.shape.cols, T(0));
  const auto& t = kern::active_table<T>();
  for (std::size_t r = 0; r < na.shape.rows; ++r)
    t.acc(n.val.data(), na.val.data() + r * na.shape.cols, na.shape.cols);
  T inv = T(1) / T(na.shape.rows);
  t.vaffine(n.val.data(), n.val.data(), n.val.size(), inv, T(0));
  return push(std::move(n));
}

template <typename T>
typename Graph<T>::Ref Graph<T>::seg_sum(Ref a, int k) {
  auto& na = at(a);
  SANERF_SHAPE_CHECK(k > 0 && na.shape.rows % std::size_t(k) == 0,
                     "seg_sum: rows ", na.shape.rows, " not divisible by ", k);
  Node<T> n;
  n.op = Op::kSegSum, n.a = a, n.i0 = k;
  n.shape = {na.shape.rows / std::size_t(k), na.shape.cols};
  n.requires_grad = na.requires_grad;
  n.val.assign(n.shape.numel(), T(0));
  const auto& t = kern::active_table<T>();
  std::size_t C = na.shape.cols;
  for (std::size_t g = 0; g < n.shape.rows; ++g)
    for (int r = 0; r < k; ++r)
      t.acc(n.val.data() + g * C, na.val.data() + (g * k + r) * C, C);
  return push(std::move(n));
}

template <typename T>
typename Graph<T>::Ref Graph<T>::repeat_rows(Ref a, int k) {
  auto& na = at(a);
  SANERF_SHAPE_CHECK(k > 0, "repeat_rows: k must be positive");
  Node<T> n;
  n.op = Op::kRepeatRows, n.a = a, n.i0 = k;
  n.shape = {na.shape.rows * std::size_t(k), na.shape.cols};
  n.requires_grad = na.requires_grad;
  n.val.resize(n.shape.numel());
  std::size_t C = na.shape.cols;
  for (std::size_t g = 0; g < na.shape.rows; ++g)
    for (int r = 0; r < k; ++r)
      std::memcpy(n.val.data() + (g * k + r) * C, na.val.data() + g * C,
                  sizeof(T) * C);
  return push(std::move(n));
}

template <typename T>
typename Graph<T>::Ref Graph<T>::bcast_scalar(Ref a, std::size_t rows,
                                              std::size_t cols) {
  auto& na = at(a);
  SANERF_SHAPE_CHECK(na.shape.numel() == 1, "bcast_scalar: input not scalar");
  Node<T> n;
  n.op = Op::kBcastScalar, n.a = a, n.shape = {rows, cols};
  n.requires_grad = na.requires_grad;
  n.val.assign(rows * cols, na.val[0]);
  return push(std::move(n));
}

template <typename T>
typename Graph<T>::Ref Graph<T>::cumsum_ex(Ref a, int k) {
  auto& na = at(a);
  SANERF_SHAPE_CHECK(k > 0 && na.shape.rows % std::size_t(k) == 0,
                     "cumsum_ex: rows ", na.shape.rows, " not divisible by ", k);
  Node<T> n;
  n.op = Op::kCumsumExSeg, n.a = a, n.i0 = k, n.shape = na.shape;
  n.requires_grad = na.requires_grad;
  n.val.resize(n.shape.numel());
  std::size_t C = na.shape.cols, G = na.shape.rows / std::size_t(k);
  for (std::size_t g = 0; g < G; ++g)
    for (std::size_t c = 0; c < C; ++c) {
      T run = T(0);
      for (int r = 0; r < k; ++r) {
        std::size_t i = (g * k + r) * C + c;
        n.val[i] = run;
        run += na.val[i];
      }
    }
  return push(std::move(n));
}

template <typename T>
typename Graph<T>::Ref Graph<T>::slice_rows(Ref a, std::size_t r0,
                                            std::size_t r1) {
  auto& na = at(a);
  SANERF_SHAPE_CHECK(r0 < r1 && r1 <= na.shape.rows, "slice_rows [", r0, ",",
                     r1, ") of ", na.shape.rows);
  Node<T> n;
  n.op = Op::kSliceRows, n.a = a, n.i0 = int(r0), n.i1 = int(r1);
  n.shape = {r1 - r0, na.shape.cols};
  n.requires_grad = na.requires_grad;
  n.val.assign(na.val.begin() + r0 * na.shape.cols,
               na.val.begin() + r1 * na.shape.cols);
  return push(std::move(n));
}

template <typename T>
typename Graph<T>::Ref Graph<T>::slice_cols(Ref a, std::size_t c0,
                                            std::size_t c1) {
  auto& na = at(a);
  SANERF_SHAPE_CHECK(c0 < c1 && c1 <= na.shape.cols, "slice_cols [", c0, ",",
                     c1, ") of ", na.shape.cols);
  Node<T> n;
  n.op = Op::kSliceCols, n.a = a, n.i0 = int(c0), n.i1 = int(c1);
  n.shape = {na.shape.rows, c1 - c0};
  n.requires_grad = na.requires_grad;
  n.val.resize(n.shape.numel());
  for (std::size_t r = 0; r < n.shape.rows; ++r)
    std::memcpy(n.val.data() + r * n.shape.cols,
                na.val.data() + r * na.shape.cols + c0,
                sizeof(T) * n.shape.cols);
  return push(std::move(n));
}

template <typename T>
typename Graph<T>::Ref Graph<T>::concat_rows(Ref a, Ref b) {
  auto &na = at(a), &nb = at(b);
  SANERF_SHAPE_CHECK(na.shape.cols == nb.shape.cols, "concat_rows: cols ",
                     na.shape.cols, " vs ", nb.shape.cols);
  Node<T> n;
  n.op = Op::kConcatRows, n.a = a, n.b = b;
  n.shape = {na.shape.rows + nb.shape.rows, na.shape.cols};
  n.requires_grad = na.requires_grad || nb.requires_grad;
  n.val.resize(n.shape.numel());
  std::memcpy(n.val.data(), na.val.data(), sizeof(T) * na.val.size());
  std::memcpy(n.val.data() + na.val.size(), nb.val.data(),
              sizeof(T) * nb.val.size());
  return push(std::move(n));
}

template <typename T>
typename Graph<T>::Ref Graph<T>::concat_cols(Ref a, Ref b) {
  auto &na = at(a), &nb = at(b);
  SANERF_SHAPE_CHECK(na.shape.rows == nb.shape.rows, "concat_cols: rows ",
                     na.shape.rows, " vs ", nb.shape.rows);
  Node<T> n;
  n.op = Op::kConcatCols, n.a = a, n.b = b;
  n.shape = {na.shape.rows, na.shape.cols + nb.shape.cols};
  n.requires_grad = na.requires_grad || nb.requires_grad;
  n.val.resize(n.shape.numel());
  std::size_t Ca = na.shape.cols, Cb = nb.shape.cols;
  for (std::size_t r = 0; r < n.shape.rows; ++r) {
    std::memcpy(n.val.data() + r * (Ca + Cb), na.val.data() + r * Ca,
                sizeof(T) * Ca);
    std::memcpy(n.val.data() + r * (Ca + Cb) + Ca, nb.val.data() + r * Cb,
                sizeof(T) * Cb);
  }
  return push(std::move(n));
}

template <typename T>
typename Graph<T>::Ref Graph<T>::conv2d(Ref x, Ref w, int H, int W, int k,
                                        int stride) {
  auto &nx = at(x), &nw = at(w);
  SANERF_SHAPE_CHECK(nx.shape.rows == std::size_t(H) * std::size_t(W),
                     "conv2d: rows ", nx.shape.rows, " != ", H, "x", W);
  int C = int(nx.shape.cols);
  SANERF_SHAPE_CHECK(nw.shape.cols == std::size_t(k * k * C),
                     "conv2d: weight cols ", nw.shape.cols, " != ", k * k * C);
  ConvGeom g = conv_geom(H, W, C, k, stride);
  Node<T> n;
  n.op = Op::kConv2d, n.a = x, n.b = w;
  n.i0 = H, n.i1 = W, n.i2 = k, n.i3 = stride;
  n.shape = {std::size_t(g.Ho) * std::size_t(g.Wo), nw.shape.rows};
  n.requires_grad = nx.requires_grad || nw.requires_grad;
  n.val.resize(n.shape.numel());
  auto& xc = scratch<T>();
  xc.resize(n.shape.rows * nw.shape.cols);
  im2col(g, nx.val.data(), xc.data());
  auto& wt = scratch2<T>();
  wt.resize(nw.shape.numel());
  transpose_into(nw.val.data(), nw.shape.rows, nw.shape.cols, wt.data());
  kern::active_table<T>().gemm_nn(n.shape.rows, n.shape.cols, nw.shape.cols,
                                  xc.data(), wt.data(), n.val.data(), false);
  return push(std::move(n));
}

// zero-filled gradient target; for backward ops that touch only part of the
// input (slices, conv col2im) and therefore need defined zeros elsewhere
template <typename T>
Buf<T>& Graph<T>::grad_buf(Ref r) {
  auto& n = at(r);
  if (n.grad.empty()) n.grad.assign(n.shape.numel(), T(0));
  return n.grad;
}

// gradient target for ops whose backward covers every element of the input:
// on first touch the buffer stays uninitialized and `fresh` tells the caller
// to write instead of accumulate, saving grad_buf's per-node memset
template <typename T>
T* Graph<T>::grad_out(Ref r, bool& fresh) {
  auto& n = at(r);
  fresh = n.grad.empty();
  if (fresh) n.grad.resize(n.shape.numel());
  return n.grad.data();
}

template <typename T>
void Graph<T>::backward(Ref loss) {
  auto& ln = at(loss);
  SANERF_CHECK(ln.shape.numel() == 1, "backward: loss must be scalar");
  SANERF_CHECK(ln.requires_grad, "backward: loss does not depend on params");
  grad_buf(loss)[0] = T(1);
  for (int i = loss; i >= 0; --i) {
    auto& n = nodes_[i];
    if (n.grad.empty() || n.op == Op::kLeaf) continue;
    backward_node(i);
  }
}

template <typename T>
void Graph<T>::backward_node(int idx) {
  const auto& t = kern::active_table<T>();
  auto& n = nodes_[idx];
  const T* g = n.grad.data();
  const std::size_t R = n.shape.rows, C = n.shape.cols;
  auto want = [&](Ref r) { return r >= 0 && nodes_[r].requires_grad; };
  bool f = false;

  switch (n.op) {
    case Op::kLeaf:
      break;
    case Op::kAdd:
      if (want(n.a)) {
        T* da = grad_out(n.a, f);
        acc_or_copy(t, da, g, R * C, f);
      }
      if (want(n.b)) {
        T* db = grad_out(n.b, f);
        acc_or_copy(t, db, g, R * C, f);
      }
      break;
    case Op::kSub:
      if (want(n.a)) {
        T* da = grad_out(n.a, f);
        acc_or_copy(t, da, g, R * C, f);
      }
      if (want(n.b)) {
        T* db = grad_out(n.b, f);
        acc_or_scale(t, db, g, T(-1), R * C, f);
      }
      break;
    case Op::kMul:
      if (want(n.a)) {
        T* da = grad_out(n.a, f);
        acc_or_mul(t, da, g, nodes_[n.b].val.data(), R * C, f);
      }
      if (want(n.b)) {
        T* db = grad_out(n.b, f);
        acc_or_mul(t, db, g, nodes_[n.a].val.data(), R * C, f);
      }
      break;
    case Op::kAddRowVec:
      if (want(n.a)) {
        T* da = grad_out(n.a, f);
        acc_or_copy(t, da, g, R * C, f);
      }
      if (want(n.b)) {
        T* db = grad_out(n.b, f);
        if (f) std::memcpy(db, g, sizeof(T) * C);
        for (std::size_t r = f ? 1 : 0; r < R; ++r) t.acc(db, g + r * C, C);
      }
      break;
    case Op::kMulColVec: {
      const auto& bval = nodes_[n.b].val;
      if (want(n.a)) {
        T* da = grad_out(n.a, f);
        for (std::size_t r = 0; r < R; ++r)
          acc_or_scale(t, da + r * C, g + r * C, bval[r], C, f);
      }
      if (want(n.b)) {
        T* db = grad_out(n.b, f);
        const T* aval = nodes_[n.a].val.data();
        for (std::size_t r = 0; r < R; ++r) {
          T d = t.dot(g + r * C, aval + r * C, C);
          if (f)
            db[r] = d;
          else
            db[r] += d;
        }
      }
      break;
    }
    case Op::kAffine:
      if (want(n.a)) {
        T* da = grad_out(n.a, f);
        acc_or_scale(t, da, g, n.s0, R * C, f);
      }
      break;
    case Op::kMatMul: {
      const auto& na = nodes_[n.a];
      const auto& nb = nodes_[n.b];
      std::size_t M = R, N = C, K = na.shape.cols;
      if (want(n.a)) {
        T* da = grad_out(n.a, f);
        auto& bt = scratch<T>();
        bt.resize(K * N);
        transpose_into(nb.val.data(), K, N, bt.data());
        if (M >= 256 && num_threads() > 1) {
          parallel_for(M, [&](std::size_t m0, std::size_t m1) {
            t.gemm_nn(m1 - m0, K, N, g + m0 * N, bt.data(), da + m0 * K, !f);
          });
        } else {
          t.gemm_nn(M, K, N, g, bt.data(), da, !f);
        }
      }
      if (want(n.b)) {
        T* db = grad_out(n.b, f);
        t.gemm_tn(K, N, M, na.val.data(), g, db, !f);
      }
      break;
    }
    case Op::kExp:
      if (want(n.a)) {
        T* da = grad_out(n.a, f);
        acc_or_mul(t, da, g, n.val.data(), R * C, f);
      }
      break;
    case Op::kSin:
      if (want(n.a)) {
        auto& tmp = scratch<T>();
        tmp.resize(R * C);
        t.vcos(nodes_[n.a].val.data(), tmp.data(), R * C);
        T* da = grad_out(n.a, f);
        acc_or_mul(t, da, g, tmp.data(), R * C, f);
      }
      break;
    case Op::kCos:
      if (want(n.a)) {
        auto& tmp = scratch<T>();
        tmp.resize(R * C);
        t.vsin(nodes_[n.a].val.data(), tmp.data(), R * C);
        t.vaffine(tmp.data(), tmp.data(), R * C, T(-1), T(0));
        T* da = grad_out(n.a, f);
        acc_or_mul(t, da, g, tmp.data(), R * C, f);
      }
      break;
    case Op::kRelu:
      if (want(n.a)) {
        T* da = grad_out(n.a, f);
        const T* a = nodes_[n.a].val.data();
        if (f)
          for (std::size_t i = 0; i < R * C; ++i)
            da[i] = a[i] > T(0) ? g[i] : T(0);
        else
          for (std::size_t i = 0; i < R * C; ++i)
            da[i] += a[i] > T(0) ? g[i] : T(0);
      }
      break;
    case Op::kSigmoid:
      if (want(n.a)) {
        auto& tmp = scratch<T>();
        tmp.resize(R * C);
        t.vaffine(n.val.data(), tmp.data(), R * C, T(-1), T(1));  // 1-y
        t.vmul(tmp.data(), n.val.data(), tmp.data(), R * C);      // y(1-y)
        T* da = grad_out(n.a, f);
        acc_or_mul(t, da, g, tmp.data(), R * C, f);
      }
      break;
    case Op::kSoftplus:
      if (want(n.a)) {
        auto& tmp = scratch<T>();
        tmp.resize(R * C);
        t.vsigmoid(nodes_[n.a].val.data(), tmp.data(), R * C);
        T* da = grad_out(n.a, f);
        acc_or_mul(t, da, g, tmp.data(), R * C, f);
      }
      break;
    case Op::kRecip:
      if (want(n.a)) {
        T* da = grad_out(n.a, f);
        const T* y = n.val.data();
        if (f)
          for (std::size_t i = 0; i < R * C; ++i) da[i] = -g[i] * y[i] * y[i];
        else
          for (std::size_t i = 0; i < R * C; ++i) da[i] -= g[i] * y[i] * y[i];
      }
      break;
    case Op::kSum:
      if (want(n.a)) {
        T* da = grad_out(n.a, f);
        std::size_t na = nodes_[n.a].shape.numel();
        T g0 = g[0];
        if (f)
          std::fill_n(da, na, g0);
        else
          for (std::size_t i = 0; i < na; ++i) da[i] += g0;
      }
      break;
    case Op::kRowSum:
      if (want(n.a)) {
        T* da = grad_out(n.a, f);
        std::size_t Ca = nodes_[n.a].shape.cols;
        for (std::size_t r = 0; r < nodes_[n.a].shape.rows; ++r)
          for (std::size_t c = 0; c < Ca; ++c)
            if (f)
              da[r * Ca + c] = g[r];
            else
              da[r * Ca + c] += g[r];
      }
      break;
    case Op::kMeanRows:
      if (want(n.a)) {
        T* da = grad_out(n.a, f);
        std::size_t Ra = nodes_[n.a].shape.rows;
        T inv = T(1) / T(Ra);
        for (std::size_t r = 0; r < Ra; ++r)
          acc_or_scale(t, da + r * C, g, inv, C, f);
      }
      break;
    case Op::kSegSum:
      if (want(n.a)) {
        T* da = grad_out(n.a, f);
        for (std::size_t grp = 0; grp < R; ++grp)
          for (int r = 0; r < n.i0; ++r)
            acc_or_copy(t, da + (grp * n.i0 + r) * C, g + grp * C, C, f);
      }
      break;
    case Op::kRepeatRows:
      if (want(n.a)) {
        T* da = grad_out(n.a, f);
        std::size_t G = nodes_[n.a].shape.rows;
        for (std::size_t grp = 0; grp < G; ++grp) {
          acc_or_copy(t, da + grp * C, g + grp * n.i0 * C, C, f);
          for (int r = 1; r < n.i0; ++r)
            t.acc(da + grp * C, g + (grp * n.i0 + r) * C, C);
        }
      }
      break;
    case Op::kBcastScalar:
      if (want(n.a)) {
        T* da = grad_out(n.a, f);
        T s = t.sum(g, R * C);
        if (f)
          da[0] = s;
        else
          da[0] += s;
      }
      break;
    case Op::kCumsumExSeg:
      if (want(n.a)) {
        T* da = grad_out(n.a, f);
        std::size_t G = R / std::size_t(n.i0);
        for (std::size_t grp = 0; grp < G; ++grp)
          for (std::size_t c = 0; c < C; ++c) {
            T down = T(0);
            for (int r = n.i0 - 1; r >= 0; --r) {
              std::size_t i = (grp * n.i0 + r) * C + c;
              if (f)
                da[i] = down;
              else
                da[i] += down;
              down += g[i];
            }
          }
      }
      break;
    case Op::kSliceRows:
      if (want(n.a))
        t.acc(grad_buf(n.a).data() + std::size_t(n.i0) * C, g, R * C);
      break;
    case Op::kSliceCols:
      if (want(n.a)) {
        T* da = grad_buf(n.a).data();
        std::size_t Ca = nodes_[n.a].shape.cols;
        for (std::size_t r = 0; r < R; ++r)
          t.acc(da + r * Ca + std::size_t(n.i0), g + r * C, C);
      }
      break;
    case Op::kConcatRows: {
      std::size_t Ra = nodes_[n.a].shape.rows;
      if (want(n.a)) {
        T* da = grad_out(n.a, f);
        acc_or_copy(t, da, g, Ra * C, f);
      }
      if (want(n.b)) {
        T* db = grad_out(n.b, f);
        acc_or_copy(t, db, g + Ra * C, nodes_[n.b].shape.numel(), f);
      }
      break;
    }
    case Op::kConcatCols: {
      std::size_t Ca = nodes_[n.a].shape.cols, Cb = nodes_[n.b].shape.cols;
      if (want(n.a)) {
        T* da = grad_out(n.a, f);
        for (std::size_t r = 0; r < R; ++r)
          acc_or_copy(t, da + r * Ca, g + r * C, Ca, f);
      }
      if (want(n.b)) {
        T* db = grad_out(n.b, f);
        for (std::size_t r = 0; r < R; ++r)
          acc_or_copy(t, db + r * Cb, g + r * C + Ca, Cb, f);
      }
      break;
    }
    case Op::kConv2d: {
      const auto& nx = nodes_[n.a];
      const auto& nw = nodes_[n.b];
      ConvGeom geo = conv_geom(n.i0, n.i1, int(nx.shape.cols), n.i2, n.i3);
      std::size_t P = n.shape.rows, Cout = n.shape.cols, J = nw.shape.cols;
      auto& xc = scratch<T>();
      xc.resize(P * J);
      im2col(geo, nx.val.data(), xc.data());
      if (want(n.b)) {
        T* dw = grad_out(n.b, f);
        t.gemm_tn(Cout, J, P, g, xc.data(), dw, !f);
      }
      if (want(n.a)) {
        // col2im accumulates overlapping patches, so the target needs zeros
        auto& dxc = scratch2<T>();
        dxc.resize(P * J);
        t.gemm_nn(P, J, Cout, g, nw.val.data(), dxc.data(), false);
        col2im_add(geo, dxc.data(), grad_buf(n.a).data());
      }
      break;
    }
  }
}

template class Graph<float>;
template class Graph<double>;

}  // namespace sanerf::ad
