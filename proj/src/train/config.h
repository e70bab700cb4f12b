#pragma once

#include <cstdint>
#include <string>

#include "field/field.h"

namespace sanerf::train {

// Everything a training run needs, serializable as one JSON document so the
// effective configuration can be echoed next to the checkpoint. Defaults are
// the standard desk-scale settings.
struct TrainConfig {
  int steps = 2000;
  int rays_per_step = 15;       // photometric pixel rays per step
  int features_per_triple = 4;  // matches drawn from the step's triple
  double lr = 5e-4;
  double lr_final = 5e-5;  // exponential decay lands here on the last step
  std::uint64_t seed = 1;
  double alpha = 1.0, beta = 1.0;  // loss term weights
  int n_coarse = 64, n_fine = 64;  // samples per ray, per level
  double min_gate_weight = 0.5;    // ray weight needed to keep a match

  bool direct_pose = false;  // ablation: per-image pose parameters, no CNN
  int pose_input_w = 0, pose_input_h = 0;  // 0: use the native image size
  int pose_base_channels = 16;

  std::string matcher = "detector";  // or "oracle" on synthetic scenes
  double detector_ratio = 0.8;
  int max_pairs_per_anchor = 1 << 30;

  field::FieldConfig field;  // shared by the coarse and fine networks

  int log_every = 25;        // progress print cadence
  int checkpoint_every = 0;  // periodic checkpoint cadence; 0 = final only
};

// lr(step): geometric interpolation from lr to lr_final across the run
double lr_at(const TrainConfig& cfg, int step);

void validate(const TrainConfig& cfg);

// canonical JSON echo (sorted keys); parse rejects unknown keys
std::string config_to_json(const TrainConfig& cfg);
TrainConfig config_from_json(const std::string& text);

// dotted-path override, e.g. ("field.hidden", "96") or ("lr", "1e-3");
// values parse as JSON first and fall back to plain strings
void apply_override(TrainConfig& cfg, const std::string& key,
                    const std::string& value);

}  // namespace sanerf::train
