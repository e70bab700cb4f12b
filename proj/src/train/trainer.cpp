#include "train/trainer.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>

#include "ad/checkpoint.h"
#include "core/common.h"
#include "geom/posefile.h"
#include "render/renderer.h"

namespace sanerf::train {
namespace fs = std::filesystem;

TripleSet prepare_triples(match::MatchTable table, const std::vector<int>& pool,
                          int max_pairs_per_anchor) {
  SANERF_CHECK(pool.size() >= 3, "training needs at least 3 images, got ",
               pool.size());
  std::set<int> in(pool.begin(), pool.end());
  SANERF_CHECK(in.size() == pool.size(), "duplicate pool image ids");
  for (int i : pool)
    SANERF_CHECK(i >= 0 && i < table.n, "pool image ", i, " out of range");

  // images outside the pool must not influence reference selection, the
  // connectivity check, or the triples (held-out views stay untouched)
  for (auto& [key, matches] : table.pairs)
    if (!in.count(key.first) || !in.count(key.second)) matches.clear();

  TripleSet out;
  out.graph = match::graph_of(table);
  out.ref_id = match::select_reference(out.graph);

  std::vector<int> off;
  for (int i : pool)
    if (i != out.ref_id && !table.matched(out.ref_id, i)) off.push_back(i);
  if (!off.empty()) {
    std::string list;
    for (std::size_t k = 0; k < off.size(); ++k)
      list += (k ? ", " : "") + std::to_string(off[k]);
    throw Error(strcat_("match graph is disconnected: reference image ",
                        out.ref_id, " shares too few matches with image(s) ",
                        list));
  }

  out.triples =
      match::triples_for_anchor(table, out.ref_id, max_pairs_per_anchor);
  SANERF_CHECK(!out.triples.empty(), "no usable triples around reference ",
               out.ref_id);
  return out;
}

namespace {

posenet::PoseNetConfig pose_config(const TrainConfig& cfg,
                                   const data::Dataset& ds) {
  posenet::PoseNetConfig pc;
  pc.input_w = cfg.pose_input_w > 0 ? cfg.pose_input_w : ds.scene.intr.width;
  pc.input_h = cfg.pose_input_h > 0 ? cfg.pose_input_h : ds.scene.intr.height;
  pc.base_channels = cfg.pose_base_channels;
  pc.direct_pose = cfg.direct_pose;
  pc.n_images = int(ds.images.size());
  return pc;
}

}  // namespace

Trainer::Trainer(const data::Dataset& ds, const TrainConfig& cfg,
                 std::vector<int> pool, TripleSet triples)
    : ds_(ds),
      cfg_(cfg),
      pool_(std::move(pool)),
      ts_(std::move(triples)),
      coarse_(cfg.field, "coarse."),
      fine_(cfg.field, "fine."),
      net_(pose_config(cfg, ds), "pn."),
      root_(cfg.seed) {
  validate(cfg_);
  SANERF_CHECK(!ds_.images.empty(), "dataset has no images");
  SANERF_CHECK(ds_.scene.far > ds_.scene.near && ds_.scene.near > 0,
               "bad near/far bounds");
  config_echo_ = config_to_json(cfg_);
  coarse_.init(store_, root_);
  fine_.init(store_, root_);
  net_.init(store_, root_);
}

loss::LossReport Trainer::train_step() {
  const int W = ds_.scene.intr.width, H = ds_.scene.intr.height;
  Rng rng = root_.fork(std::uint64_t(step_) + 1);

  const auto& tri = ts_.triples[rng.below(ts_.triples.size())];
  const std::array<int, 3> ids = {tri.ref_id, tri.img_i, tri.img_j};

  // draw a subset of the triple's matches (uniform, without replacement)
  match::MatchTriple sub;
  sub.ref_id = tri.ref_id;
  sub.img_i = tri.img_i;
  sub.img_j = tri.img_j;
  const int avail = int(tri.matches.size());
  const int want = std::min(cfg_.features_per_triple, avail);
  if (want > 0) {
    std::vector<int> idx(avail);
    std::iota(idx.begin(), idx.end(), 0);
    for (int k = 0; k < want; ++k)
      std::swap(idx[k], idx[k + int(rng.below(std::uint64_t(avail - k)))]);
    idx.resize(want);
    std::sort(idx.begin(), idx.end());
    for (int i : idx) sub.matches.push_back(tri.matches[i]);
  }
  auto fr = loss::feature_rays(sub, ds_.images[ids[0]], ds_.images[ids[1]],
                               ds_.images[ids[2]]);

  // pixel rays, uniform over the triple's three images
  std::array<std::vector<double>, 3> pu, pv;
  std::array<std::vector<float>, 3> ptruth;
  for (int r = 0; r < cfg_.rays_per_step; ++r) {
    int slot = int(rng.below(3));
    int u = int(rng.below(std::uint64_t(W)));
    int v = int(rng.below(std::uint64_t(H)));
    pu[slot].push_back(u);
    pv[slot].push_back(v);
    const float* px = ds_.images[ids[slot]].at(u, v);
    ptruth[slot].insert(ptruth[slot].end(), {px[0], px[1], px[2]});
  }

  ad::Graph32 g;
  auto fnc = render::field_fn<float>(coarse_, store_);
  auto fnf = render::field_fn<float>(fine_, store_);
  auto poses = posenet::poses_for_triple(g, store_, net_, ds_.images, ids[0],
                                         ids[1], ids[2]);
  render::RenderConfig rc;
  rc.n_coarse = cfg_.n_coarse;
  rc.n_fine = cfg_.n_fine;
  rc.jitter = true;

  int pixc = -1, pixf = -1, featc = -1, featf = -1;
  std::array<int, 3> xs = {-1, -1, -1}, ws = {-1, -1, -1};
  std::vector<float> pix_truth;
  auto append = [&g](int& acc, int part) {
    acc = acc < 0 ? part : g.concat_rows(acc, part);
  };
  for (int k = 0; k < 3; ++k) {
    std::vector<double> us = pu[k], vs = pv[k];
    const std::size_t npix = us.size();
    for (int r = 0; r < fr.m; ++r) {
      us.push_back(fr.u[std::size_t(k) * fr.m + r]);
      vs.push_back(fr.v[std::size_t(k) * fr.m + r]);
    }
    if (us.empty()) continue;
    std::vector<float> dc;
    dc.reserve(us.size() * 3);
    for (std::size_t r = 0; r < us.size(); ++r) {
      geom::Vec3 d = geom::pixel_dir_cam(ds_.scene.intr, us[r], vs[r]);
      dc.insert(dc.end(), {float(d.x()), float(d.y()), float(d.z())});
    }
    const auto& P = poses.at(ids[k]);
    auto dirs = g.matmul(g.constant({us.size(), 3}, dc), P.Rt);
    auto two = render::render_rays(g, fnc, fnf, P.t, dirs, ds_.scene.near,
                                   ds_.scene.far, rc, rng);
    if (npix > 0) {
      append(pixc, g.slice_rows(two.coarse.color, 0, npix));
      append(pixf, g.slice_rows(two.fine.color, 0, npix));
      pix_truth.insert(pix_truth.end(), ptruth[k].begin(), ptruth[k].end());
    }
    if (fr.m > 0) {
      append(featc, g.slice_rows(two.coarse.color, npix, us.size()));
      append(featf, g.slice_rows(two.fine.color, npix, us.size()));
      xs[k] = g.slice_rows(two.fine.expected, npix, us.size());
      ws[k] = g.slice_rows(two.fine.total_weight, npix, us.size());
    }
  }

  auto truth_node =
      g.constant({std::size_t(cfg_.rays_per_step), 3}, pix_truth);
  int pixel = g.add(loss::photometric_loss(g, pixf, truth_node),
                    loss::photometric_loss(g, pixc, truth_node));
  int feature = -1;
  loss::Gated<float> gate;
  if (fr.m > 0) {
    auto ft = g.constant({std::size_t(3 * fr.m), 3}, fr.truth);
    feature = g.add(loss::feature_color_loss(g, featf, ft),
                    loss::feature_color_loss(g, featc, ft));
    gate = loss::match_consistency_loss(g, xs[0], xs[1], xs[2], ws[0], ws[1],
                                        ws[2], cfg_.min_gate_weight);
  }
  auto tot = loss::total_loss(g, pixel, feature, gate,
                              loss::LossWeights{cfg_.alpha, cfg_.beta});

  if (!std::isfinite(tot.report.total))
    throw Error(strcat_("non-finite loss at step ", step_));
  g.backward(tot.total);

  std::vector<std::pair<std::string, const float*>> grads;
  for (const auto& [name, ref] : g.params()) {
    const auto* gv = g.grad(ref);
    if (!gv) continue;
    for (float x : *gv)
      if (!std::isfinite(x))
        throw Error(strcat_("non-finite gradient in '", name, "' at step ",
                            step_));
    grads.emplace_back(name, gv->data());
  }
  adam_.step(store_, grads, float(lr_at(cfg_, step_)));
  ++step_;
  return tot.report;
}

int Trainer::canonical_partner(int image_id) const {
  int best = -1;
  long long best_count = -1;
  for (int j : pool_) {
    if (j == image_id || j == ts_.ref_id) continue;
    long long c = ts_.graph.pair_count[image_id][j];
    if (c > best_count) {
      best_count = c;
      best = j;
    }
  }
  SANERF_CHECK(best >= 0, "no partner image for ", image_id);
  return best;
}

geom::Pose Trainer::pose_of(int image_id) const {
  SANERF_CHECK(std::find(pool_.begin(), pool_.end(), image_id) != pool_.end(),
               "image ", image_id, " is not in the training pool");
  if (image_id == ts_.ref_id) return geom::Pose{};

  int partner = canonical_partner(image_id);
  ad::Graph32 g;
  auto poses = posenet::poses_for_triple(g, store_, net_, ds_.images,
                                         ts_.ref_id, std::min(image_id, partner),
                                         std::max(image_id, partner));
  const auto& P = poses.at(image_id);
  const auto& R = g.val(P.R);
  const auto& t = g.val(P.t);
  geom::Pose out;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out.R(r, c) = R[std::size_t(r) * 3 + c];
  out.t = geom::Vec3(t[0], t[1], t[2]);
  return out;
}

std::map<int, geom::Pose> Trainer::pool_poses() const {
  std::map<int, geom::Pose> out;
  for (int i : pool_) out[i] = pose_of(i);
  return out;
}

void Trainer::adopt_posenet(const ad::ParamStore32& other) {
  int copied = 0;
  for (const auto& [name, e] : other.all()) {
    if (name.rfind("pn.", 0) != 0) continue;
    SANERF_CHECK(store_.contains(name), "warm start has unexpected tensor '",
                 name, "'");
    auto& mine = store_.at(name);
    SANERF_CHECK(mine.value.size() == e.value.size(),
                 "warm start shape mismatch for '", name, "'");
    mine.value = e.value;  // values only; Adam moments start fresh
    ++copied;
  }
  SANERF_CHECK(copied > 0, "warm start store has no pose network tensors");
}

void Trainer::save(const std::string& path) const {
  ad::CheckpointMeta meta;
  meta.step = std::uint64_t(step_);
  meta.adam_t = adam_.t();
  meta.rng_state = root_.serialize();
  meta.config_json = config_echo_;
  ad::save_checkpoint(path, store_, meta);
}

void Trainer::load(const std::string& path) {
  auto meta = ad::load_checkpoint(path, store_);
  SANERF_CHECK(meta.config_json == config_echo_,
               "checkpoint '", path, "' was written with a different config");
  step_ = int(meta.step);
  adam_.set_t(meta.adam_t);
  root_ = Rng::deserialize(meta.rng_state);
}

Phase phase_from_string(const std::string& s) {
  if (s == "all") return Phase::All;
  if (s == "train-only") return Phase::TrainOnly;
  throw Error(strcat_("unknown phase '", s,
                      "' (expected 'all' or 'train-only')"));
}

RunResult train_scene(const data::Dataset& ds, const TrainConfig& cfg,
                      Phase phase, const std::string& out_dir,
                      const match::MatchTable& table,
                      const ad::ParamStore32* warm_posenet,
                      const std::map<int, geom::Pose>* frozen, bool resume,
                      std::ostream* progress) {
  validate(cfg);
  const int n = int(ds.images.size());
  std::vector<int> pool;
  if (phase == Phase::All) {
    pool.resize(n);
    std::iota(pool.begin(), pool.end(), 0);
  } else {
    pool = ds.train_idx;
    for (int i : ds.test_idx)
      SANERF_CHECK(frozen && frozen->count(i),
                   "train-only phase needs a frozen pose for held-out image ",
                   i, " (pass the phase-A pose estimates)");
  }

  auto ts = prepare_triples(table, pool, cfg.max_pairs_per_anchor);
  Trainer tr(ds, cfg, pool, std::move(ts));
  if (warm_posenet) tr.adopt_posenet(*warm_posenet);

  fs::create_directories(out_dir);
  RunResult out;
  out.checkpoint_path = (fs::path(out_dir) / "checkpoint.bin").string();
  out.poses_path = (fs::path(out_dir) / "poses_est.txt").string();
  out.log_path = (fs::path(out_dir) / "train_log.csv").string();
  out.config_path = (fs::path(out_dir) / "config.json").string();

  bool resumed = false;
  if (resume && fs::exists(out.checkpoint_path)) {
    tr.load(out.checkpoint_path);
    resumed = true;
    if (progress)
      *progress << "resumed from step " << tr.step() << "\n";
  }

  {
    std::ofstream cf(out.config_path, std::ios::trunc);
    SANERF_CHECK(cf.good(), "cannot write '", out.config_path, "'");
    cf << config_to_json(cfg);
  }
  std::ofstream csv(out.log_path,
                    resumed ? std::ios::app : std::ios::trunc);
  SANERF_CHECK(csv.good(), "cannot write '", out.log_path, "'");
  csv << std::setprecision(10);
  if (!resumed)
    csv << "step,lr,total,pixel,feat_color,pr,l3d,gated_fraction,"
           "matches_used,matches_total\n";

  while (tr.step() < cfg.steps) {
    StepLog row;
    row.step = tr.step();
    row.lr = lr_at(cfg, row.step);
    row.report = tr.train_step();
    const auto& r = row.report;
    csv << row.step << ',' << row.lr << ',' << r.total << ',' << r.pixel
        << ',' << r.feat_color << ',' << r.pr << ',' << r.l3d << ','
        << r.gated_fraction << ',' << r.matches_used << ','
        << r.matches_total << '\n';
    if (progress &&
        (row.step % cfg.log_every == 0 || row.step + 1 == cfg.steps))
      *progress << "step " << row.step + 1 << "/" << cfg.steps << "  loss "
                << r.total << "  pr " << r.pr << "  l3d " << r.l3d << "\n";
    if (cfg.checkpoint_every > 0 && tr.step() % cfg.checkpoint_every == 0 &&
        tr.step() < cfg.steps)
      tr.save(out.checkpoint_path);
    out.log.push_back(std::move(row));
  }
  tr.save(out.checkpoint_path);

  out.ref_id = tr.ref_id();
  out.poses = tr.pool_poses();
  for (int i = 0; i < n; ++i) {
    if (out.poses.count(i)) continue;
    out.poses[i] = frozen->at(i);  // presence checked up front
  }
  std::vector<geom::Pose> flat;
  flat.reserve(n);
  for (int i = 0; i < n; ++i) flat.push_back(out.poses.at(i));
  geom::save_poses(out.poses_path, flat,
                   strcat_("estimated camera-to-world poses; reference image ",
                           out.ref_id, " pinned to identity"));
  return out;
}

}  // namespace sanerf::train
