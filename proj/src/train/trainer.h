#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "ad/params.h"
#include "core/rng.h"
#include "data/manifest.h"
#include "field/field.h"
#include "loss/losses.h"
#include "match/matching.h"
#include "posenet/posenet.h"
#include "train/config.h"

namespace sanerf::train {

// Matching preprocessing for a training pool. Triples are anchored at the
// selected reference image; every pool image must share enough matches with
// the reference or preprocessing aborts listing the offenders.
struct TripleSet {
  int ref_id = -1;
  std::vector<match::MatchTriple> triples;
  match::MatchGraph graph;
};

// `table` covers all dataset images; pairs touching images outside `pool`
// are ignored. `pool` needs at least 3 images.
TripleSet prepare_triples(match::MatchTable table, const std::vector<int>& pool,
                          int max_pairs_per_anchor);

struct StepLog {
  int step = 0;
  double lr = 0;
  loss::LossReport report;
};

// Owns the joint optimization state: one coarse and one fine radiance field,
// the pose network, Adam, and the step RNG. One instance per phase/run.
class Trainer {
 public:
  Trainer(const data::Dataset& ds, const TrainConfig& cfg,
          std::vector<int> pool, TripleSet triples);

  // one sampled triple: render, loss, backward, Adam. Throws on a non-finite
  // loss or gradient, naming the first bad tensor.
  loss::LossReport train_step();

  int step() const { return step_; }
  int ref_id() const { return ts_.ref_id; }
  const TrainConfig& config() const { return cfg_; }
  const std::vector<int>& pool() const { return pool_; }
  ad::ParamStore32& store() { return store_; }
  const ad::ParamStore32& store() const { return store_; }

  // current pose estimate in the reference frame; the reference itself is
  // exactly identity. Only defined for pool images.
  geom::Pose pose_of(int image_id) const;
  std::map<int, geom::Pose> pool_poses() const;

  // copies pose-network parameter values (moments reset); phase-B warm start
  void adopt_posenet(const ad::ParamStore32& other);

  void save(const std::string& path) const;
  void load(const std::string& path);  // resume; config must match exactly

 private:
  int canonical_partner(int image_id) const;

  const data::Dataset& ds_;
  TrainConfig cfg_;
  std::vector<int> pool_;
  TripleSet ts_;
  field::Field coarse_, fine_;
  posenet::PoseNet net_;
  ad::ParamStore32 store_;
  ad::Adam32 adam_;
  Rng root_;
  int step_ = 0;
  std::string config_echo_;
};

enum class Phase { All, TrainOnly };
Phase phase_from_string(const std::string& s);  // "all" | "train-only"

struct RunResult {
  int ref_id = -1;
  std::vector<StepLog> log;
  std::map<int, geom::Pose> poses;  // every dataset image
  std::string checkpoint_path, poses_path, log_path, config_path;
};

// One full phase: preprocessing, the step loop, checkpoint + pose dump + CSV
// log + config echo under `out_dir`. For Phase::TrainOnly the held-out poses
// are not estimated and must be supplied via `frozen` (phase-A estimates).
// `warm_posenet` seeds the pose network (phase-B warm start). With `resume`,
// an existing checkpoint in `out_dir` is loaded and training continues.
RunResult train_scene(const data::Dataset& ds, const TrainConfig& cfg,
                      Phase phase, const std::string& out_dir,
                      const match::MatchTable& table,
                      const ad::ParamStore32* warm_posenet = nullptr,
                      const std::map<int, geom::Pose>* frozen = nullptr,
                      bool resume = false, std::ostream* progress = nullptr);

}  // namespace sanerf::train
