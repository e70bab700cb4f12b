#include "ad/params.h"

#include <cmath>

namespace sanerf::ad {

template <typename T>
void Adam<T>::step(ParamStore<T>& store,
                   const std::vector<std::pair<std::string, const T*>>& grads,
                   T lr) {
  ++t_;
  const T b1 = cfg_.beta1, b2 = cfg_.beta2;
  const T bc1 = T(1) - T(std::pow(double(b1), double(t_)));
  const T bc2 = T(1) - T(std::pow(double(b2), double(t_)));
  for (const auto& [name, g] : grads) {
    if (!g) continue;
    auto& e = store.at(name);
    const std::size_t n = e.shape.numel();
    if (e.m.empty()) {
      e.m.assign(n, T(0));
      e.v.assign(n, T(0));
    }
    T* m = e.m.data();
    T* v = e.v.data();
    T* p = e.value.data();
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = b1 * m[i] + (T(1) - b1) * g[i];
      v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
      T mh = m[i] / bc1;
      T vh = v[i] / bc2;
      p[i] -= lr * mh / (std::sqrt(vh) + cfg_.eps);
    }
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace sanerf::ad
