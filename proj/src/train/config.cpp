#include "train/config.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "core/common.h"
#include "json.hpp"

namespace sanerf::train {
namespace {

using nlohmann::json;

json field_to_json(const field::FieldConfig& f) {
  return json{{"pos_bands", f.pos_bands},
              {"dir_bands", f.dir_bands},
              {"include_input", f.include_input},
              {"depth", f.depth},
              {"hidden", f.hidden},
              {"skip_at", f.skip_at},
              {"color_hidden", f.color_hidden},
              {"separate_heads", f.separate_heads},
              {"pos_scale", f.pos_scale},
              {"density_bias", f.density_bias}};
}

json cfg_to_json(const TrainConfig& c) {
  return json{{"steps", c.steps},
              {"rays_per_step", c.rays_per_step},
              {"features_per_triple", c.features_per_triple},
              {"lr", c.lr},
              {"lr_final", c.lr_final},
              {"seed", c.seed},
              {"alpha", c.alpha},
              {"beta", c.beta},
              {"n_coarse", c.n_coarse},
              {"n_fine", c.n_fine},
              {"min_gate_weight", c.min_gate_weight},
              {"direct_pose", c.direct_pose},
              {"pose_input_w", c.pose_input_w},
              {"pose_input_h", c.pose_input_h},
              {"pose_base_channels", c.pose_base_channels},
              {"matcher", c.matcher},
              {"detector_ratio", c.detector_ratio},
              {"max_pairs_per_anchor", c.max_pairs_per_anchor},
              {"field", field_to_json(c.field)},
              {"log_every", c.log_every},
              {"checkpoint_every", c.checkpoint_every}};
}

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const char* where) {
  for (const auto& [key, _] : j.items())
    SANERF_CHECK(known.count(key), "unknown config key '", key, "' in ", where);
}

TrainConfig cfg_from_json(const json& j) {
  SANERF_CHECK(j.is_object(), "config must be a JSON object");
  TrainConfig c;
  json full = cfg_to_json(c);  // defaults carry the key inventory
  std::set<std::string> top, fld;
  for (const auto& [k, _] : full.items()) top.insert(k);
  for (const auto& [k, _] : full["field"].items()) fld.insert(k);
  reject_unknown(j, top, "config");
  if (j.count("field")) reject_unknown(j["field"], fld, "config.field");

  auto get = [&](const char* key, auto& slot) {
    if (j.count(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
  };
  get("steps", c.steps);
  get("rays_per_step", c.rays_per_step);
  get("features_per_triple", c.features_per_triple);
  get("lr", c.lr);
  get("lr_final", c.lr_final);
  get("seed", c.seed);
  get("alpha", c.alpha);
  get("beta", c.beta);
  get("n_coarse", c.n_coarse);
  get("n_fine", c.n_fine);
  get("min_gate_weight", c.min_gate_weight);
  get("direct_pose", c.direct_pose);
  get("pose_input_w", c.pose_input_w);
  get("pose_input_h", c.pose_input_h);
  get("pose_base_channels", c.pose_base_channels);
  get("matcher", c.matcher);
  get("detector_ratio", c.detector_ratio);
  get("max_pairs_per_anchor", c.max_pairs_per_anchor);
  get("log_every", c.log_every);
  get("checkpoint_every", c.checkpoint_every);
  if (j.count("field")) {
    const json& f = j.at("field");
    auto getf = [&](const char* key, auto& slot) {
      if (f.count(key)) slot = f.at(key).get<std::decay_t<decltype(slot)>>();
    };
    getf("pos_bands", c.field.pos_bands);
    getf("dir_bands", c.field.dir_bands);
    getf("include_input", c.field.include_input);
    getf("depth", c.field.depth);
    getf("hidden", c.field.hidden);
    getf("skip_at", c.field.skip_at);
    getf("color_hidden", c.field.color_hidden);
    getf("separate_heads", c.field.separate_heads);
    getf("pos_scale", c.field.pos_scale);
    getf("density_bias", c.field.density_bias);
  }
  validate(c);
  return c;
}

}  // namespace

double lr_at(const TrainConfig& cfg, int step) {
  if (cfg.lr <= 0) return 0.0;
  double span = std::max(1, cfg.steps - 1);
  double t = std::clamp(double(step) / span, 0.0, 1.0);
  double ratio = std::max(cfg.lr_final, 1e-12) / cfg.lr;
  return cfg.lr * std::pow(ratio, t);
}

void validate(const TrainConfig& cfg) {
  SANERF_CHECK(cfg.steps > 0, "steps must be positive");
  SANERF_CHECK(cfg.rays_per_step > 0, "rays_per_step must be positive");
  SANERF_CHECK(cfg.features_per_triple >= 0,
               "features_per_triple must be non-negative");
  SANERF_CHECK(cfg.lr >= 0 && cfg.lr_final >= 0,
               "learning rates must be non-negative");
  SANERF_CHECK(cfg.alpha >= 0 && cfg.beta >= 0,
               "loss weights must be non-negative");
  SANERF_CHECK(cfg.n_coarse > 0 && cfg.n_fine >= 0, "bad sample counts");
  SANERF_CHECK(cfg.min_gate_weight >= 0 && cfg.min_gate_weight <= 1,
               "min_gate_weight must be in [0,1]");
  SANERF_CHECK(cfg.pose_input_w >= 0 && cfg.pose_input_h >= 0 &&
                   cfg.pose_base_channels > 0,
               "bad pose network dimensions");
  SANERF_CHECK(cfg.matcher == "detector" || cfg.matcher == "oracle",
               "matcher must be 'detector' or 'oracle', got '", cfg.matcher,
               "'");
  SANERF_CHECK(cfg.detector_ratio > 0 && cfg.detector_ratio < 1,
               "detector_ratio must be in (0,1)");
  SANERF_CHECK(cfg.max_pairs_per_anchor > 0,
               "max_pairs_per_anchor must be positive");
  SANERF_CHECK(cfg.log_every > 0, "log_every must be positive");
  SANERF_CHECK(cfg.checkpoint_every >= 0,
               "checkpoint_every must be non-negative");
}

std::string config_to_json(const TrainConfig& cfg) {
  return cfg_to_json(cfg).dump(2) + "\n";
}

TrainConfig config_from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  SANERF_CHECK(!j.is_discarded(), "config is not valid JSON");
  try {
    return cfg_from_json(j);
  } catch (const json::exception& e) {
    throw Error(strcat_("bad config value: ", e.what()));
  }
}

void apply_override(TrainConfig& cfg, const std::string& key,
                    const std::string& value) {
  json doc = cfg_to_json(cfg);
  std::string path = "/" + key;
  std::replace(path.begin(), path.end(), '.', '/');
  json parsed = json::parse(value, nullptr, false);
  if (parsed.is_discarded()) parsed = value;  // plain string, e.g. matcher=oracle
  try {
    json::json_pointer ptr(path);
    SANERF_CHECK(doc.contains(ptr), "unknown config key '", key, "'");
    doc[ptr] = parsed;
    cfg = cfg_from_json(doc);
  } catch (const json::exception& e) {
    throw Error(strcat_("bad override '", key, "=", value, "': ", e.what()));
  }
}

}  // namespace sanerf::train
