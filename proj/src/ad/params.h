#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ad/graph.h"

namespace sanerf::ad {

template <typename T>
struct ParamEntry {
  Shape shape;
  std::vector<T> value;
  std::vector<T> m, v;  // Adam moments, allocated on first update
};

// Named persistent parameters. std::map keeps iteration order deterministic,
// which checkpointing and the optimizer rely on.
template <typename T>
class ParamStore {
 public:
  ParamEntry<T>& create(const std::string& name, Shape shape) {
    SANERF_CHECK(!params_.count(name), "param '", name, "' already exists");
    auto& e = params_[name];
    e.shape = shape;
    e.value.assign(shape.numel(), T(0));
    return e;
  }
  ParamEntry<T>& at(const std::string& name) {
    auto it = params_.find(name);
    SANERF_CHECK(it != params_.end(), "unknown param '", name, "'");
    return it->second;
  }
  const ParamEntry<T>& at(const std::string& name) const {
    auto it = params_.find(name);
    SANERF_CHECK(it != params_.end(), "unknown param '", name, "'");
    return it->second;
  }
  bool contains(const std::string& name) const { return params_.count(name) > 0; }
  std::map<std::string, ParamEntry<T>>& all() { return params_; }
  const std::map<std::string, ParamEntry<T>>& all() const { return params_; }
  std::size_t count() const { return params_.size(); }
  void clear() { params_.clear(); }

  // convenience: register every param of this store as a graph leaf
  typename Graph<T>::Ref leaf(Graph<T>& g, const std::string& name) const {
    const auto& e = at(name);
    return g.param(name, e.shape, e.value.data());
  }

 private:
  std::map<std::string, ParamEntry<T>> params_;
};

// value-only copy into another precision (Adam moments are not carried over);
// lets the float64 finite-difference harness reuse float32 initializers
template <typename To, typename From>
ParamStore<To> cast_store(const ParamStore<From>& src) {
  ParamStore<To> out;
  for (const auto& [name, e] : src.all()) {
    auto& n = out.create(name, e.shape);
    for (std::size_t i = 0; i < e.value.size(); ++i)
      n.value[i] = static_cast<To>(e.value[i]);
  }
  return out;
}

template <typename T>
struct AdamConfig {
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  T eps = T(1e-8);
};

template <typename T>
class Adam {
 public:
  explicit Adam(AdamConfig<T> cfg = {}) : cfg_(cfg) {}

  // one optimizer step; grads are keyed by param name, null pointers skipped
  void step(ParamStore<T>& store,
            const std::vector<std::pair<std::string, const T*>>& grads, T lr);

  std::int64_t t() const { return t_; }
  void set_t(std::int64_t t) { t_ = t; }
  const AdamConfig<T>& config() const { return cfg_; }

 private:
  AdamConfig<T> cfg_;
  std::int64_t t_ = 0;
};

using ParamStore32 = ParamStore<float>;
using Adam32 = Adam<float>;

}  // namespace sanerf::ad
