#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include "core/rng.h"
#include "data/image.h"
#include "data/scene.h"
#include "doctest.h"
#include "match/features.h"
#include "match/matching.h"

using namespace sanerf;
using namespace sanerf::match;

namespace {

std::string tmp_path(const char* tag) {
  auto p = std::filesystem::temp_directory_path() /
           (std::string("sanerf_match_") + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  return p.string();
}

data::SceneDesc textured_scene(int w, int h, int n_images,
                               const std::string& layout = "arc",
                               double arc_deg = 48.0, double tex_scale = 1.0) {
  data::GenConfig cfg;
  cfg.seed = 7;
  cfg.n_images = n_images;
  cfg.width = w;
  cfg.height = h;
  cfg.layout = layout;
  cfg.arc_deg = arc_deg;
  cfg.texture_scale = tex_scale;
  return data::generate_scene(cfg);
}

data::Image render_view(const data::SceneDesc& sc, int cam) {
  return data::render_scene(sc, sc.cams[cam], sc.intr);
}

data::Image noise_image(int w, int h, std::uint64_t seed) {
  data::Image img(w, h);
  Rng rng(seed);
  for (float& p : img.pix) p = float(rng.uniform());
  return img;
}

// dark background with one bright axis-aligned square
data::Image square_image(int w, int h, int lo, int hi) {
  data::Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      float v = (x >= lo && x <= hi && y >= lo && y <= hi) ? 0.9f : 0.1f;
      float* c = img.at(x, y);
      c[0] = c[1] = c[2] = v;
    }
  return img;
}

// copy of `img` translated by (dx, dy) pixels with clamped borders
data::Image shifted(const data::Image& img, int dx, int dy) {
  data::Image out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      int sx = std::clamp(x - dx, 0, img.width - 1);
      int sy = std::clamp(y - dy, 0, img.height - 1);
      const float* s = img.at(sx, sy);
      float* d = out.at(x, y);
      d[0] = s[0];
      d[1] = s[1];
      d[2] = s[2];
    }
  return out;
}

using MatchKey = std::tuple<int, int, double, double, double, double>;

std::vector<MatchKey> keyed(const std::vector<PairMatch>& ms, bool swap_sides) {
  std::vector<MatchKey> out;
  for (const auto& m : ms)
    out.push_back(swap_sides ? MatchKey{m.idb, m.ida, m.ub, m.vb, m.ua, m.va}
                             : MatchKey{m.ida, m.idb, m.ua, m.va, m.ub, m.vb});
  std::sort(out.begin(), out.end());
  return out;
}

// closest points between two rays; returns their separation and midpoint
double ray_gap(const geom::Ray& r1, const geom::Ray& r2, geom::Vec3& mid) {
  double a = r1.d.dot(r1.d), b = r1.d.dot(r2.d), c = r2.d.dot(r2.d);
  geom::Vec3 w = r1.o - r2.o;
  double d = r1.d.dot(w), e = r2.d.dot(w);
  double den = a * c - b * b;
  REQUIRE(std::abs(den) > 1e-12);
  double s = (b * e - c * d) / den;
  double t = (a * e - b * d) / den;
  geom::Vec3 p1 = r1.o + s * r1.d, p2 = r2.o + t * r2.d;
  mid = 0.5 * (p1 + p2);
  return (p1 - p2).norm();
}

MatchTable hand_table(int n,
                      std::map<std::pair<int, int>, std::vector<PairMatch>> pairs) {
  MatchTable t;
  t.n = n;
  t.pairs = std::move(pairs);
  return t;
}

// matches with ids only; uv encodes the id so sides are distinguishable
std::vector<PairMatch> id_matches(const std::vector<std::pair<int, int>>& ids) {
  std::vector<PairMatch> out;
  for (auto [a, b] : ids)
    out.push_back({100.0 + a, 200.0 + a, 100.0 + b, 300.0 + b, a, b});
  return out;
}

}  // namespace

TEST_CASE("harris detector finds localized corners") {
  data::Image img = square_image(64, 64, 20, 44);
  auto feats = detect_features(img);
  REQUIRE(feats.size() >= 4);
  for (const auto& f : feats) {
    CHECK(f.u >= 0);
    CHECK(f.u <= 63);
    CHECK(f.v >= 0);
    CHECK(f.v <= 63);
    CHECK((f.scale == 1 || f.scale == 2 || f.scale == 4));
    // descriptors are zero-mean and unit length
    double mean = 0, nrm = 0;
    for (float d : f.desc) mean += d;
    mean /= double(f.desc.size());
    for (float d : f.desc) nrm += double(d) * d;
    CHECK(std::abs(mean) < 1e-4);
    CHECK(std::abs(std::sqrt(nrm) - 1.0) < 1e-4);
    CHECK(f.desc.size() == 121);
  }
  // each square corner has a full-resolution detection within 1.5 px
  const double corners[4][2] = {{20, 20}, {20, 44}, {44, 20}, {44, 44}};
  for (auto& c : corners) {
    double best = 1e9;
    for (const auto& f : feats)
      if (f.scale == 1)
        best = std::min(best, std::hypot(f.u - c[0], f.v - c[1]));
    CHECK(best < 1.5);
  }
}

TEST_CASE("harris detector is deterministic and rejects empty input") {
  data::SceneDesc sc = textured_scene(96, 72, 2);
  data::Image img = render_view(sc, 0);
  auto f1 = detect_features(img);
  auto f2 = detect_features(img);
  REQUIRE(f1.size() >= 30);
  REQUIRE(f1.size() == f2.size());
  for (std::size_t i = 0; i < f1.size(); ++i) {
    CHECK(f1[i].u == f2[i].u);
    CHECK(f1[i].v == f2[i].v);
    CHECK(f1[i].scale == f2[i].scale);
    CHECK(f1[i].response == f2[i].response);
    CHECK(f1[i].desc == f2[i].desc);
  }
  CHECK_THROWS_AS(detect_features(data::Image()), Error);
  HarrisConfig bad;
  bad.octaves = 0;
  CHECK_THROWS_AS(detect_features(img, bad), Error);
}

TEST_CASE("feature positions track image translation") {
  data::SceneDesc sc = textured_scene(96, 72, 2);
  data::Image a = render_view(sc, 0);
  data::Image b = shifted(a, 4, 4);  // divisible by every pyramid factor
  auto ms = detect_and_match_pair(a, b, harris_detector());
  REQUIRE(ms.size() >= 20);
  int clean = 0, interior = 0;
  for (const auto& m : ms) {
    // skip matches near the clamped border seam
    if (m.ua < 12 || m.va < 12 || m.ua > a.width - 13 || m.va > a.height - 13)
      continue;
    ++interior;
    if (std::abs(m.ub - m.ua - 4.0) < 1e-6 && std::abs(m.vb - m.va - 4.0) < 1e-6)
      ++clean;
  }
  REQUIRE(interior >= 10);
  CHECK(clean >= interior * 9 / 10);
}

TEST_CASE("an image matched against itself matches every feature at distance zero") {
  data::SceneDesc sc = textured_scene(96, 72, 2);
  data::Image img = render_view(sc, 0);
  auto feats = detect_features(img);
  REQUIRE(feats.size() >= 30);
  auto ms = detect_and_match_pair(img, img, harris_detector());
  REQUIRE(ms.size() == feats.size());
  std::sort(ms.begin(), ms.end(),
            [](const PairMatch& x, const PairMatch& y) { return x.ida < y.ida; });
  for (std::size_t i = 0; i < ms.size(); ++i) {
    CHECK(ms[i].ida == int(i));
    CHECK(ms[i].idb == int(i));
    CHECK(ms[i].ua == ms[i].ub);
    CHECK(ms[i].va == ms[i].vb);
  }
}

TEST_CASE("ratio test rejects matches against pure noise") {
  data::SceneDesc sc = textured_scene(96, 72, 2);
  data::Image img = render_view(sc, 0);
  auto det = harris_detector();
  auto fa = det(img);
  int worst = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto fb = det(noise_image(96, 72, seed));
    int n = int(match_features(fa, fb).size());
    worst = std::max(worst, n);
  }
  CHECK(worst < 5);
}

TEST_CASE("pair matching is symmetric") {
  data::SceneDesc sc = textured_scene(96, 72, 3);
  data::Image a = render_view(sc, 0);
  data::Image b = render_view(sc, 1);
  auto det = harris_detector();
  auto ab = detect_and_match_pair(a, b, det);
  auto ba = detect_and_match_pair(b, a, det);
  REQUIRE(ab.size() >= 10);
  CHECK(keyed(ab, false) == keyed(ba, true));
  CHECK_THROWS_AS(match_features(det(a), det(b), 0.0), Error);
}

TEST_CASE("textured scene pairs yield plentiful and consistent matches") {
  data::SceneDesc sc = textured_scene(160, 120, 4, "arc", 48.0, 1.5);
  std::vector<data::Image> imgs;
  for (int i = 0; i < 4; ++i) imgs.push_back(render_view(sc, i));
  auto matcher = image_matcher(imgs, harris_detector());
  for (int i = 0; i + 1 < 4; ++i) {
    auto ms = matcher(i, i + 1);
    CHECK(ms.size() >= 50);

    // matches should agree with ground-truth geometry: trace the left pixel
    // to its surface point, reproject into the right view
    int inliers = 0, tested = 0;
    std::vector<double> errs;
    for (const auto& m : ms) {
      geom::Ray r = geom::make_ray(sc.cams[i], sc.intr, m.ua, m.va);
      data::Hit h = data::trace(sc, r.o, r.d);
      if (!h.valid) continue;
      double u, v;
      if (!geom::project(sc.cams[i + 1], sc.intr, h.point, u, v)) continue;
      ++tested;
      double e = std::hypot(u - m.ub, v - m.vb);
      errs.push_back(e);
      if (e < 2.0) ++inliers;
    }
    REQUIRE(tested >= 40);
    std::sort(errs.begin(), errs.end());
    CHECK(errs[errs.size() / 2] < 2.0);   // median reprojection error
    CHECK(inliers * 2 >= tested);         // at least half are geometric inliers
  }
}

TEST_CASE("oracle matches reproject exactly and triangulate to one point") {
  data::SceneDesc sc = textured_scene(64, 48, 5);
  auto pts = data::sample_surface_points(sc, 400, 99);
  for (std::size_t k = 0; k < pts.size(); ++k) REQUIRE(pts[k].id == int(k));
  auto matcher = oracle_matcher(sc, pts);

  int total = 0;
  for (int j = 1; j < 5; ++j) {
    auto ms = matcher(0, j);
    total += int(ms.size());
    for (const auto& m : ms) {
      REQUIRE(m.ida == m.idb);
      const geom::Vec3& x = pts[m.ida].xyz;
      double u, v;
      REQUIRE(geom::project(sc.cams[0], sc.intr, x, u, v));
      CHECK(std::hypot(u - m.ua, v - m.va) < 1e-9);
      REQUIRE(geom::project(sc.cams[j], sc.intr, x, u, v));
      CHECK(std::hypot(u - m.ub, v - m.vb) < 1e-9);

      geom::Ray ra = geom::make_ray(sc.cams[0], sc.intr, m.ua, m.va);
      geom::Ray rb = geom::make_ray(sc.cams[j], sc.intr, m.ub, m.vb);
      geom::Vec3 mid;
      CHECK(ray_gap(ra, rb, mid) < 1e-6);
      CHECK((mid - x).norm() < 1e-6);
    }
  }
  CHECK(total > 100);
}

TEST_CASE("triple construction respects the pair threshold") {
  // pair (0,1) sits below the "more than three" bar, the others clear it
  auto weak = id_matches({{0, 0}, {1, 1}});
  auto s02 = id_matches({{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}});
  auto s12 = id_matches({{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}});
  MatchTable t = hand_table(
      3, {{{0, 1}, weak}, {{0, 2}, s02}, {{1, 2}, s12}});

  MatchGraph g = graph_of(t);
  CHECK(g.pair_count[0][1] == 2);
  CHECK(g.pair_count[1][0] == 2);
  CHECK(g.matched_images(0) == 1);
  CHECK(g.matched_images(1) == 1);
  CHECK(g.matched_images(2) == 2);
  CHECK(g.correspondences(0) == 5);
  CHECK(g.correspondences(2) == 10);

  // anchors 0 and 1 have a single matched partner each -> no pair to form;
  // anchor 2 forms (2; 0, 1) but the weak (0,1) pair empties its match set
  CHECK(triples_for_anchor(t, 0).empty());
  CHECK(triples_for_anchor(t, 1).empty());
  auto ts = triples_for_anchor(t, 2);
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].ref_id == 2);
  CHECK(ts[0].img_i == 0);
  CHECK(ts[0].img_j == 1);
  CHECK(ts[0].matches.empty());
}

TEST_CASE("triple matches chain through the reference and verify the far pair") {
  auto m01 = id_matches({{10, 1}, {11, 2}, {12, 3}, {13, 4}, {14, 5}});
  auto m02 = id_matches({{10, 21}, {11, 22}, {12, 23}, {15, 25}, {16, 26}});
  auto m12 = id_matches({{1, 21}, {2, 22}, {3, 99}, {7, 77}, {8, 88}});
  MatchTable t = hand_table(3, {{{0, 1}, m01}, {{0, 2}, m02}, {{1, 2}, m12}});

  auto ts = triples_for_anchor(t, 0);
  REQUIRE(ts.size() == 1);
  const MatchTriple& tr = ts[0];
  CHECK(tr.ref_id == 0);
  CHECK(tr.img_i == 1);
  CHECK(tr.img_j == 2);
  // ref 10 -> (1, 21) verified, ref 11 -> (2, 22) verified,
  // ref 12 -> (3, 23) absent from (1,2), refs 13..16 do not chain
  REQUIRE(tr.matches.size() == 2);
  CHECK(tr.matches[0].ref_feat == 10);
  CHECK(tr.matches[1].ref_feat == 11);
  // uv fields pull from the correct sides of each pair record
  CHECK(tr.matches[0].ur == 110.0);
  CHECK(tr.matches[0].vr == 210.0);
  CHECK(tr.matches[0].ui == 101.0);
  CHECK(tr.matches[0].vi == 301.0);
  CHECK(tr.matches[0].uj == 121.0);
  CHECK(tr.matches[0].vj == 321.0);

  // anchor 1: chain (0,1) and (1,2) through img-1 feature ids
  auto t1 = triples_for_anchor(t, 1);
  REQUIRE(t1.size() == 1);
  CHECK(t1[0].ref_id == 1);
  CHECK(t1[0].img_i == 0);
  CHECK(t1[0].img_j == 2);
  REQUIRE(t1[0].matches.size() == 2);
  CHECK(t1[0].matches[0].ref_feat == 1);
  CHECK(t1[0].matches[1].ref_feat == 2);
}

TEST_CASE("three identical images produce one full triple per anchor") {
  data::SceneDesc sc = textured_scene(96, 72, 2);
  data::Image img = render_view(sc, 0);
  std::size_t n_feats = detect_features(img).size();
  REQUIRE(n_feats >= 30);

  std::vector<data::Image> imgs = {img, img, img};
  BuildResult res = build_triples(3, image_matcher(imgs, harris_detector()));
  REQUIRE(res.triples.size() == 3);
  std::set<int> anchors;
  for (const auto& t : res.triples) {
    anchors.insert(t.ref_id);
    CHECK(t.matches.size() == n_feats);
  }
  CHECK(anchors == std::set<int>{0, 1, 2});
  CHECK(res.graph.pair_count[0][1] == int(n_feats));

  CHECK_THROWS_AS(build_triples(2, image_matcher(imgs, harris_detector())), Error);
}

TEST_CASE("triple enumeration honors the per-anchor cap") {
  auto full = id_matches({{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}});
  std::map<std::pair<int, int>, std::vector<PairMatch>> pairs;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) pairs[{i, j}] = full;
  MatchTable t = hand_table(4, pairs);

  CHECK(triples_for_anchor(t, 0).size() == 3);  // C(3,2)
  CHECK(triples_for_anchor(t, 0, 1).size() == 1);
  CHECK(triples_for_anchor(t, 0, 0).empty());

  PairMatcher m = [&](int i, int j) { return t.at(i, j); };
  BuildResult capped = build_triples(4, m, 1);
  CHECK(capped.triples.size() == 4);
  BuildResult all = build_triples(4, m);
  CHECK(all.triples.size() == 12);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(all.graph.pair_count[i][j] == (i == j ? 0 : 5));
}

TEST_CASE("orbit oracle triples match independent visibility counts") {
  data::SceneDesc sc = textured_scene(64, 48, 5, "orbit");
  auto pts = data::sample_surface_points(sc, 500, 31);
  auto matcher = oracle_matcher(sc, pts);
  BuildResult res = build_triples(5, matcher);

  // independent expectation straight from the visibility oracle
  std::map<std::pair<int, int>, std::set<int>> vis;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) {
      std::set<int> ids;
      for (const auto& m : data::oracle_matches(sc, pts, i, j)) ids.insert(m.id);
      CHECK(res.graph.pair_count[i][j] == int(ids.size()));
      CHECK(res.graph.pair_count[j][i] == int(ids.size()));
      if (int(ids.size()) > kPairMatchThreshold) vis[{i, j}] = std::move(ids);
    }
  auto vis_of = [&](int i, int j) {
    if (i > j) std::swap(i, j);
    auto it = vis.find({i, j});
    return it == vis.end() ? std::set<int>{} : it->second;
  };

  std::size_t expected_triples = 0;
  for (int a = 0; a < 5; ++a) {
    int partners = 0;
    for (int j = 0; j < 5; ++j)
      if (j != a && !vis_of(a, j).empty()) ++partners;
    CHECK(res.graph.matched_images(a) == partners);
    expected_triples += std::size_t(partners) * (partners - 1) / 2;
  }
  REQUIRE(res.triples.size() == expected_triples);
  REQUIRE(expected_triples >= 5);

  for (const auto& t : res.triples) {
    std::set<int> expect;
    for (int id : vis_of(t.ref_id, t.img_i))
      if (vis_of(t.ref_id, t.img_j).count(id) && vis_of(t.img_i, t.img_j).count(id))
        expect.insert(id);
    REQUIRE(t.matches.size() == expect.size());
    for (const auto& o : t.matches) CHECK(expect.count(o.ref_feat) == 1);
  }
}

TEST_CASE("reference selection follows the lexicographic rule") {
  auto graph_from_counts = [](int n, std::map<std::pair<int, int>, int> c) {
    MatchGraph g;
    g.n = n;
    g.pair_count.assign(n, std::vector<int>(n, 0));
    for (auto& [k, v] : c) {
      g.pair_count[k.first][k.second] = v;
      g.pair_count[k.second][k.first] = v;
    }
    return g;
  };

  // image 0 and 1 both match three partners; 0 wins on correspondences
  MatchGraph g = graph_from_counts(
      4, {{{0, 1}, 50}, {{0, 2}, 30}, {{0, 3}, 20}, {{1, 2}, 20}, {{1, 3}, 10}});
  CHECK(g.matched_images(0) == 3);
  CHECK(g.correspondences(0) == 100);
  CHECK(g.matched_images(1) == 3);
  CHECK(g.correspondences(1) == 80);
  CHECK(g.matched_images(2) == 2);
  CHECK(select_reference(g) == 0);

  // full tie -> lowest index
  MatchGraph ring = graph_from_counts(
      4, {{{0, 1}, 10}, {{1, 2}, 10}, {{2, 3}, 10}, {{0, 3}, 10}});
  CHECK(select_reference(ring) == 0);

  // counts at the threshold exactly do not qualify
  MatchGraph th = graph_from_counts(3, {{{0, 1}, 4}, {{0, 2}, 3}});
  CHECK(th.matched_images(0) == 1);
  CHECK(th.correspondences(0) == 4);
  CHECK(select_reference(th) == 0);

  MatchGraph dead = graph_from_counts(3, {{{0, 1}, 3}, {{1, 2}, 2}});
  CHECK_THROWS_AS(select_reference(dead), Error);
  CHECK_THROWS_AS(select_reference(MatchGraph{}), Error);
}

TEST_CASE("arc middle view is selected and survives relabeling") {
  data::SceneDesc sc = textured_scene(64, 48, 5, "arc", 120.0);
  auto pts = data::sample_surface_points(sc, 500, 17);
  auto matcher = oracle_matcher(sc, pts);
  MatchTable table = build_match_table(5, matcher);
  MatchGraph g = graph_of(table);

  // independent argmax by (matched images, correspondences, lowest index)
  int want = -1;
  std::tuple<int, long long, int> best{-1, -1, 0};
  for (int i = 0; i < 5; ++i) {
    std::tuple<int, long long, int> cur{g.matched_images(i), g.correspondences(i),
                                        -i};
    if (cur > best) {
      best = cur;
      want = i;
    }
  }
  REQUIRE(std::get<0>(best) > 0);
  int ref = select_reference(g);
  CHECK(ref == want);
  CHECK(ref == 2);  // the center of a 120-degree arc overlaps every other view

  // relabel images with a permutation; the choice must follow the labels
  const int perm[5] = {3, 0, 2, 4, 1};  // new index -> old index
  PairMatcher relabeled = [&](int i, int j) {
    int oi = perm[i], oj = perm[j];
    if (oi < oj) return matcher(oi, oj);
    auto ms = matcher(oj, oi);
    for (auto& m : ms) {
      std::swap(m.ua, m.ub);
      std::swap(m.va, m.vb);
      std::swap(m.ida, m.idb);
    }
    return ms;
  };
  MatchGraph g2 = graph_of(build_match_table(5, relabeled));
  CHECK(select_reference(g2) == 2);  // perm[2] == 2: old winner keeps its slot
  for (int i = 0; i < 5; ++i) {
    CHECK(g2.matched_images(i) == g.matched_images(perm[i]));
    CHECK(g2.correspondences(i) == g.correspondences(perm[i]));
  }
}

TEST_CASE("match cache round trips exactly") {
  data::SceneDesc sc = textured_scene(64, 48, 4);
  auto pts = data::sample_surface_points(sc, 300, 5);
  MatchTable t = build_match_table(4, oracle_matcher(sc, pts));
  REQUIRE(t.pairs.size() == 6);

  std::string path = tmp_path("cache") + ".jsonl";
  save_matches(path, t);
  MatchTable r = load_matches(path);
  CHECK(r.n == t.n);
  REQUIRE(r.pairs.size() == t.pairs.size());
  for (const auto& [key, ms] : t.pairs) {
    const auto& rs = r.at(key.first, key.second);
    REQUIRE(rs.size() == ms.size());
    for (std::size_t k = 0; k < ms.size(); ++k) {
      CHECK(rs[k].ida == ms[k].ida);
      CHECK(rs[k].idb == ms[k].idb);
      CHECK(rs[k].ua == ms[k].ua);
      CHECK(rs[k].va == ms[k].va);
      CHECK(rs[k].ub == ms[k].ub);
      CHECK(rs[k].vb == ms[k].vb);
    }
  }

  CHECK_THROWS_AS(load_matches(tmp_path("missing")), IoError);

  std::string bad = tmp_path("bad") + ".jsonl";
  {
    std::ofstream f(bad);
    f << "{\"kind\":\"sanerf-matches\",\"version\":1,\"n\":3}\n";
    f << "this is not json\n";
  }
  CHECK_THROWS_AS(load_matches(bad), IoError);

  std::string incomplete = tmp_path("incomplete") + ".jsonl";
  {
    std::ofstream f(incomplete);
    f << "{\"kind\":\"sanerf-matches\",\"version\":1,\"n\":3}\n";
    f << "{\"i\":0,\"j\":1,\"ida\":[1],\"idb\":[2],\"uva\":[[1.5,2.5]],"
         "\"uvb\":[[3.5,4.5]]}\n";
  }
  CHECK_THROWS_AS(load_matches(incomplete), Error);

  std::filesystem::remove(path);
  std::filesystem::remove(bad);
  std::filesystem::remove(incomplete);
}
