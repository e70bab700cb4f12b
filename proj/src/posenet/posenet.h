#pragma once

#include <map>
#include <string>
#include <vector>

#include "ad/graph.h"
#include "ad/params.h"
#include "core/rng.h"
#include "data/image.h"
#include "geom/geometry.h"

namespace sanerf::posenet {

// Convolutional pose regressor over an image triple. The three views are
// concatenated along the color channels (9 input channels), pushed through
// seven stride-2 convolutions and a 1x1 head, and globally average-pooled
// into 6*(n_views-1) = 12 numbers: Euler angles and translation for each
// non-reference image.
struct PoseNetConfig {
  int input_w = 128, input_h = 96;  // images are resampled to this on entry
  int n_views = 3;
  int base_channels = 16;          // widths 1,2,4,8,16,16,16 x base
  double translation_scale = 0.1;  // world units per unit head activation
  double head_init_scale = 0.01;   // shrinks the final 1x1 conv at init
  bool direct_pose = false;        // ablation: free per-image variables
  int n_images = 0;                // direct mode: number of pose slots
};

// (1,3) angle / translation rows inside a graph
template <typename T>
struct EulerPoseRefs {
  typename ad::Graph<T>::Ref angles = -1, trans = -1;
};

// full pose nodes consumed by the renderer
template <typename T>
struct PoseRefs {
  typename ad::Graph<T>::Ref R = -1, Rt = -1, t = -1;  // (3,3),(3,3),(1,3)
  bool identity = false;  // reference view: constant {I, 0}
};

class PoseNet {
 public:
  explicit PoseNet(PoseNetConfig cfg, std::string prefix = "pn.");

  const PoseNetConfig& config() const { return cfg_; }
  const std::string& prefix() const { return prefix_; }

  struct ParamSpec {
    std::string name;
    ad::Shape shape;
    int fan_in = 0, fan_out = 0;
    bool zero = false;        // biases and direct-pose variables start at 0
    double init_scale = 1.0;  // extra multiplier on the random init
  };
  std::vector<ParamSpec> param_specs() const;

  // creates missing parameters (Glorot-uniform weights, zero biases); no-op
  // when they already exist so checkpoint loads win
  void init(ad::ParamStore<float>& store, Rng& rng) const;

  // CNN forward for (reference, i, j); images must share one size
  template <typename T>
  std::pair<EulerPoseRefs<T>, EulerPoseRefs<T>> forward(
      ad::Graph<T>& g, const ad::ParamStore<T>& store, const data::Image& ref,
      const data::Image& img_i, const data::Image& img_j) const;

  // direct mode: the pose variables for one image slot
  template <typename T>
  EulerPoseRefs<T> direct_pose(ad::Graph<T>& g, const ad::ParamStore<T>& store,
                               int image_id) const;

 private:
  PoseNetConfig cfg_;
  std::string prefix_;
  std::vector<int> kernels_, channels_;
};

// Euler outputs -> rotation/translation nodes
template <typename T>
PoseRefs<T> pose_nodes(ad::Graph<T>& g, const EulerPoseRefs<T>& e);

template <typename T>
PoseRefs<T> identity_pose(ad::Graph<T>& g);

// Poses for a triple: the reference is pinned to {I, 0}, the other two come
// from the network (or the direct variables in that mode).
template <typename T>
std::map<int, PoseRefs<T>> poses_for_triple(ad::Graph<T>& g,
                                            const ad::ParamStore<T>& store,
                                            const PoseNet& net,
                                            const std::vector<data::Image>& images,
                                            int ref_id, int img_i, int img_j);

}  // namespace sanerf::posenet
