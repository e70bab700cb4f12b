#pragma once

#include <string>
#include <vector>

#include "data/scene.h"

namespace sanerf::data {

// On-disk dataset layout under a root directory:
//   manifest.json   scene description, intrinsics, splits, generator config
//   images/im_###.png
//   poses_gt.txt    ground-truth camera-to-world poses (held out of training)
//   gt_points.json  surface sample points used by the oracle matcher
struct Dataset {
  std::string name;
  SceneDesc scene;
  std::vector<Image> images;
  std::vector<int> train_idx, test_idx;
  std::vector<GtPoint> gt_points;
};

// Every 8th image (index % 8 == 0) is held out for evaluation.
bool is_test_index(int i);

// Generates the scene, renders every view, and writes the directory.
// Running twice with the same config produces byte-identical files.
Dataset write_dataset(const std::string& dir, const GenConfig& cfg,
                      const std::string& name = "scene");

Dataset load_dataset(const std::string& dir);

}  // namespace sanerf::data
