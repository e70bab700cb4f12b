#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <cstring>
#include <iterator>
#include <map>
#include <new>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "core/common.h"

namespace sanerf::ad {

// All tensors are 2-D (rows, cols). Scalars are (1,1); images enter ops like
// conv2d as (H*W, C) with the spatial extent carried by the op.
struct Shape {
  std::size_t rows = 0, cols = 0;
  std::size_t numel() const { return rows * cols; }
  bool operator==(const Shape&) const = default;
};

enum class Op {
  kLeaf,
  kAdd,
  kSub,
  kMul,
  kAddRowVec,   // (R,C) + (1,C)
  kMulColVec,   // (R,C) * (R,1)
  kAffine,      // s*x + o with scalar attributes
  kMatMul,      // (R,K) x (K,C)
  kExp,
  kSin,
  kCos,
  kRelu,
  kSigmoid,
  kSoftplus,
  kRecip,
  kSum,          // -> (1,1)
  kRowSum,       // (R,C) -> (R,1)
  kMeanRows,     // (R,C) -> (1,C); global average pooling
  kSegSum,       // (G*k,C) -> (G,C), k = i0
  kRepeatRows,   // (G,C) -> (G*k,C), k = i0
  kBcastScalar,  // (1,1) -> (R,C)
  kCumsumExSeg,  // exclusive cumsum along rows within groups of k, per column
  kSliceRows,
  kSliceCols,
  kConcatRows,
  kConcatCols,
  kConv2d,  // x:(H*W,Cin), w:(Cout,k*k*Cin) -> (Ho*Wo,Cout), stride i3, same-pad
};

// Node storage. Same surface as std::vector where the graph needs it, except
// resize() leaves new elements uninitialized: every op fully overwrites its
// value buffer and gradients are written on first touch, so the vector's
// default zero-fill would cost one wasted memset per node per step (graphs
// are rebuilt every step).
template <typename T>
class Buf {
  static_assert(std::is_trivially_copyable_v<T>);

 public:
  Buf() = default;
  Buf(const Buf& o) { assign(o.begin(), o.end()); }
  Buf(Buf&& o) noexcept { swap(o); }
  Buf& operator=(const Buf& o) {
    if (this != &o) assign(o.begin(), o.end());
    return *this;
  }
  Buf& operator=(Buf&& o) noexcept {
    swap(o);
    return *this;
  }
  ~Buf() { std::free(p_); }

  void swap(Buf& o) noexcept {
    std::swap(p_, o.p_);
    std::swap(n_, o.n_);
    std::swap(cap_, o.cap_);
  }

  T* data() { return p_; }
  const T* data() const { return p_; }
  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }
  T& operator[](std::size_t i) { return p_[i]; }
  const T& operator[](std::size_t i) const { return p_[i]; }
  T* begin() { return p_; }
  T* end() { return p_ + n_; }
  const T* begin() const { return p_; }
  const T* end() const { return p_ + n_; }
  void clear() { n_ = 0; }

  void resize(std::size_t n) {  // new elements stay uninitialized
    grow(n);
    n_ = n;
  }
  void assign(std::size_t n, T v) {
    grow(n);
    n_ = n;
    std::fill_n(p_, n_, v);
  }
  template <typename It,
            typename = typename std::iterator_traits<It>::iterator_category>
  void assign(It first, It last) {
    auto n = std::size_t(std::distance(first, last));
    grow(n);
    n_ = n;
    std::copy(first, last, p_);
  }

  friend bool operator==(const Buf& a, const Buf& b) {
    return a.n_ == b.n_ && std::equal(a.begin(), a.end(), b.begin());
  }
  friend bool operator==(const Buf& a, const std::vector<T>& b) {
    return a.n_ == b.size() && std::equal(a.begin(), a.end(), b.begin());
  }
  friend bool operator==(const std::vector<T>& a, const Buf& b) {
    return b == a;
  }

 private:
  void grow(std::size_t want) {
    if (want <= cap_) return;
    T* q = static_cast<T*>(std::malloc(want * sizeof(T)));
    if (!q) throw std::bad_alloc();
    if (n_) std::memcpy(q, p_, n_ * sizeof(T));
    std::free(p_);
    p_ = q;
    cap_ = want;
  }

  T* p_ = nullptr;
  std::size_t n_ = 0, cap_ = 0;
};

template <typename T>
struct Node {
  Op op = Op::kLeaf;
  Shape shape;
  Buf<T> val;
  Buf<T> grad;  // allocated on first backward touch
  int a = -1, b = -1;
  bool requires_grad = false;
  T s0 = 0, s1 = 0;
  int i0 = 0, i1 = 0, i2 = 0, i3 = 0;
};

// Reverse-mode graph built fresh per training step. float for training,
// double for the finite-difference test harness; both run through the same
// kernel table.
template <typename T>
class Graph {
 public:
  using Ref = int;

  Ref constant(Shape s, const T* data);
  Ref constant(Shape s, const std::vector<T>& data) {
    SANERF_SHAPE_CHECK(s.numel() == data.size(), "constant: data size ",
                       data.size(), " != shape ", s.rows, "x", s.cols);
    return constant(s, data.data());
  }
  Ref scalar(T v);
  // trainable leaf; the name keys gradient export back to the ParamStore.
  // Registering a name twice returns the existing node, so one parameter
  // used in several places accumulates a single gradient.
  Ref param(const std::string& name, Shape s, const T* data);

  Ref add(Ref a, Ref b);
  Ref sub(Ref a, Ref b);
  Ref mul(Ref a, Ref b);
  Ref add_rowvec(Ref a, Ref b);
  Ref mul_colvec(Ref a, Ref b);
  Ref affine(Ref a, T scale, T offset);
  Ref neg(Ref a) { return affine(a, T(-1), T(0)); }
  Ref matmul(Ref a, Ref b);
  Ref exp(Ref a);
  Ref sin(Ref a);
  Ref cos(Ref a);
  Ref relu(Ref a);
  Ref sigmoid(Ref a);
  Ref softplus(Ref a);
  Ref recip(Ref a);
  Ref sum(Ref a);
  Ref row_sum(Ref a);
  Ref mean_rows(Ref a);
  Ref gap(Ref a) { return mean_rows(a); }
  Ref seg_sum(Ref a, int k);
  Ref repeat_rows(Ref a, int k);
  Ref bcast_scalar(Ref a, std::size_t rows, std::size_t cols);
  Ref cumsum_ex(Ref a, int k);
  Ref slice_rows(Ref a, std::size_t r0, std::size_t r1);
  Ref slice_cols(Ref a, std::size_t c0, std::size_t c1);
  Ref concat_rows(Ref a, Ref b);
  Ref concat_cols(Ref a, Ref b);
  Ref conv2d(Ref x, Ref w, int H, int W, int k, int stride);

  void backward(Ref loss);

  const Shape& shape(Ref r) const { return nodes_[check(r)].shape; }
  const Buf<T>& val(Ref r) const { return nodes_[check(r)].val; }
  // null when the node was never reached by backward
  const Buf<T>* grad(Ref r) const {
    const auto& n = nodes_[check(r)];
    return n.grad.empty() ? nullptr : &n.grad;
  }
  bool requires_grad(Ref r) const { return nodes_[check(r)].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  // (param name, node) registered via param(), in creation order
  const std::vector<std::pair<std::string, Ref>>& params() const {
    return param_refs_;
  }

 private:
  int check(Ref r) const {
    SANERF_CHECK(r >= 0 && std::size_t(r) < nodes_.size(), "bad node ref ", r);
    return r;
  }
  Node<T>& at(Ref r) { return nodes_[check(r)]; }
  Ref push(Node<T> n);
  Buf<T>& grad_buf(Ref r);
  T* grad_out(Ref r, bool& fresh);
  void backward_node(int idx);

  std::vector<Node<T>> nodes_;
  std::vector<std::pair<std::string, Ref>> param_refs_;
  std::map<std::string, Ref> param_by_name_;
};

using Graph32 = Graph<float>;
using Graph64 = Graph<double>;

}  // namespace sanerf::ad
