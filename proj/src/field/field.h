#pragma once

#include <string>
#include <vector>

#include "ad/graph.h"
#include "ad/params.h"
#include "core/rng.h"

namespace sanerf::field {

// Radiance field hyperparameters. The defaults are sized for desk-scale
// scenes; depth/width scale up to the usual 8x256 if needed.
struct FieldConfig {
  int pos_bands = 10;        // frequency count for positions
  int dir_bands = 4;         // frequency count for view directions
  bool include_input = true; // prepend the raw coordinates to the encoding
  int depth = 4;             // trunk layers
  int hidden = 64;           // trunk width (also the color-feature width)
  int skip_at = 2;           // encoding re-injected at this layer; -1 disables
  int color_hidden = 32;     // width of the direction-conditioned color layer
  bool separate_heads = false;  // two fully separate MLPs for sigma and color
  double pos_scale = 1.0;       // positions are multiplied by this first
  double density_bias = -1.0;   // sigma = softplus(raw + density_bias)
};

// 3 * (include_input + 2*bands)
int encoding_dim(int bands, bool include_input);

// [x, sin(2^0 pi x), cos(2^0 pi x), ..., sin(2^{L-1} pi x), cos(2^{L-1} pi x)]
// applied per component of an (N,3) node; `scale` premultiplies x.
template <typename T>
typename ad::Graph<T>::Ref encode(ad::Graph<T>& g,
                                  typename ad::Graph<T>::Ref x, int bands,
                                  bool include_input, T scale = T(1));

template <typename T>
struct FieldOut {
  typename ad::Graph<T>::Ref sigma;  // (N,1), nonnegative
  typename ad::Graph<T>::Ref rgb;    // (N,3), each channel in (0,1)
};

// One radiance MLP. Parameter names carry a prefix ("coarse." / "fine.") so
// two independent levels live in a single store. Density never sees the view
// direction: it branches off before the direction encoding is injected.
class Field {
 public:
  Field(FieldConfig cfg, std::string prefix);

  const FieldConfig& config() const { return cfg_; }
  const std::string& prefix() const { return prefix_; }

  // full parameter names with their shapes, in creation order
  struct ParamSpec {
    std::string name;
    ad::Shape shape;
    int fan_in = 0, fan_out = 0;
  };
  std::vector<ParamSpec> param_specs() const;

  // creates this field's parameters (Glorot-uniform weights, zero biases);
  // a no-op when they already exist, so reloading a checkpoint wins
  void init(ad::ParamStore<float>& store, Rng& rng) const;

  // pos (N,3) world, dir (N,3) unit; parameters are pulled from the store
  template <typename T>
  FieldOut<T> evaluate(ad::Graph<T>& g, const ad::ParamStore<T>& store,
                       typename ad::Graph<T>::Ref pos,
                       typename ad::Graph<T>::Ref dir) const;

 private:
  FieldConfig cfg_;
  std::string prefix_;
};

}  // namespace sanerf::field
