#include "match/matching.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "core/common.h"
#include "core/threadpool.h"
#include "json.hpp"
#include "kern/kern.h"

namespace sanerf::match {

using nlohmann::json;

std::vector<PairMatch> match_features(const std::vector<Feature>& fa,
                                      const std::vector<Feature>& fb,
                                      double ratio) {
  SANERF_CHECK(ratio > 0 && ratio <= 1, "match_features: bad ratio");
  std::vector<PairMatch> out;
  if (fa.empty() || fb.empty()) return out;

  const std::size_t na = fa.size(), nb = fb.size(), k = fa[0].desc.size();
  SANERF_CHECK(k > 0, "match_features: empty descriptors");
  for (const auto& f : fa)
    SANERF_CHECK(f.desc.size() == k, "match_features: descriptor length mismatch");
  for (const auto& f : fb)
    SANERF_CHECK(f.desc.size() == k, "match_features: descriptor length mismatch");

  std::vector<float> A(na * k), B(nb * k);
  for (std::size_t i = 0; i < na; ++i)
    std::copy(fa[i].desc.begin(), fa[i].desc.end(), A.begin() + i * k);
  for (std::size_t j = 0; j < nb; ++j)
    std::copy(fb[j].desc.begin(), fb[j].desc.end(), B.begin() + j * k);

  const auto& kt = kern::active_table<float>();
  std::vector<float> G(na * nb);
  kt.gemm_nt(na, nb, k, A.data(), B.data(), G.data(), false);
  std::vector<double> ra(na), rb(nb);
  for (std::size_t i = 0; i < na; ++i)
    ra[i] = kt.dot(A.data() + i * k, A.data() + i * k, k);
  for (std::size_t j = 0; j < nb; ++j)
    rb[j] = kt.dot(B.data() + j * k, B.data() + j * k, k);

  // nearest and second-nearest squared distances, both directions; ties keep
  // the lowest index so results do not depend on traversal order
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<int> best_a(na, -1), best_b(nb, -1);
  std::vector<double> d1a(na, inf), d2a(na, inf), d1b(nb, inf), d2b(nb, inf);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      double d = ra[i] + rb[j] - 2.0 * double(G[i * nb + j]);
      if (d < 0) d = 0;
      if (d < d1a[i]) {
        d2a[i] = d1a[i];
        d1a[i] = d;
        best_a[i] = int(j);
      } else if (d < d2a[i]) {
        d2a[i] = d;
      }
      if (d < d1b[j]) {
        d2b[j] = d1b[j];
        d1b[j] = d;
        best_b[j] = int(i);
      } else if (d < d2b[j]) {
        d2b[j] = d;
      }
    }

  // the ratio test is applied on both sides so that (A,B) and (B,A) produce
  // the same match set
  const double r2 = ratio * ratio;
  auto pass = [&](double d1, double d2) { return d1 == 0 || d1 < r2 * d2; };
  for (std::size_t i = 0; i < na; ++i) {
    int j = best_a[i];
    if (j < 0 || best_b[j] != int(i)) continue;
    if (!pass(d1a[i], d2a[i]) || !pass(d1b[j], d2b[j])) continue;
    out.push_back({fa[i].u, fa[i].v, fb[j].u, fb[j].v, int(i), j});
  }
  return out;
}

std::vector<PairMatch> detect_and_match_pair(const data::Image& a,
                                             const data::Image& b,
                                             const Detector& det, double ratio) {
  SANERF_CHECK(a.width > 0 && a.height > 0 && b.width > 0 && b.height > 0,
               "detect_and_match_pair: empty image");
  return match_features(det(a), det(b), ratio);
}

PairMatcher image_matcher(const std::vector<data::Image>& images,
                          const Detector& det, double ratio) {
  auto feats = std::make_shared<std::vector<std::vector<Feature>>>(images.size());
  parallel_for(images.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) (*feats)[i] = det(images[i]);
  });
  return [feats, ratio](int i, int j) {
    return match_features((*feats)[i], (*feats)[j], ratio);
  };
}

PairMatcher oracle_matcher(const data::SceneDesc& scene,
                           const std::vector<data::GtPoint>& pts,
                           double margin) {
  return [scene, pts, margin](int i, int j) {
    std::vector<PairMatch> out;
    for (const auto& m : data::oracle_matches(scene, pts, i, j, margin))
      out.push_back({m.ui, m.vi, m.uj, m.vj, m.id, m.id});
    return out;
  };
}

const std::vector<PairMatch>& MatchTable::at(int i, int j) const {
  SANERF_CHECK(0 <= i && i < j && j < n, "MatchTable::at: bad pair (", i, ",", j,
               ")");
  auto it = pairs.find({i, j});
  SANERF_CHECK(it != pairs.end(), "MatchTable::at: pair (", i, ",", j,
               ") missing");
  return it->second;
}

int MatchTable::count(int i, int j) const {
  if (i == j) return 0;
  if (i > j) std::swap(i, j);
  auto it = pairs.find({i, j});
  return it == pairs.end() ? 0 : int(it->second.size());
}

MatchTable build_match_table(int n_images, const PairMatcher& matcher) {
  SANERF_CHECK(n_images >= 2, "build_match_table: need at least 2 images");
  std::vector<std::pair<int, int>> keys;
  for (int i = 0; i < n_images; ++i)
    for (int j = i + 1; j < n_images; ++j) keys.push_back({i, j});

  std::vector<std::vector<PairMatch>> results(keys.size());
  parallel_for(keys.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p)
      results[p] = matcher(keys[p].first, keys[p].second);
  });

  MatchTable table;
  table.n = n_images;
  for (std::size_t p = 0; p < keys.size(); ++p)
    table.pairs.emplace(keys[p], std::move(results[p]));
  return table;
}

int MatchGraph::matched_images(int i) const {
  int c = 0;
  for (int j = 0; j < n; ++j)
    if (j != i && pair_count[i][j] > kPairMatchThreshold) ++c;
  return c;
}

long long MatchGraph::correspondences(int i) const {
  long long c = 0;
  for (int j = 0; j < n; ++j)
    if (j != i && pair_count[i][j] > kPairMatchThreshold) c += pair_count[i][j];
  return c;
}

MatchGraph graph_of(const MatchTable& table) {
  MatchGraph g;
  g.n = table.n;
  g.pair_count.assign(table.n, std::vector<int>(table.n, 0));
  for (const auto& [key, matches] : table.pairs) {
    g.pair_count[key.first][key.second] = int(matches.size());
    g.pair_count[key.second][key.first] = int(matches.size());
  }
  return g;
}

namespace {

struct RefObs {
  double ur, vr;   // reference-side position
  double u, v;     // partner-side position
  int feat;        // partner-side feature id
};

// view of pair (anchor, other) keyed by the anchor-side feature id
std::map<int, RefObs> anchored_view(const MatchTable& table, int anchor,
                                    int other) {
  std::map<int, RefObs> out;
  if (anchor < other) {
    for (const auto& m : table.at(anchor, other))
      out.emplace(m.ida, RefObs{m.ua, m.va, m.ub, m.vb, m.idb});
  } else {
    for (const auto& m : table.at(other, anchor))
      out.emplace(m.idb, RefObs{m.ub, m.vb, m.ua, m.va, m.ida});
  }
  return out;
}

}  // namespace

std::vector<MatchTriple> triples_for_anchor(const MatchTable& table, int anchor,
                                            int max_pairs) {
  SANERF_CHECK(0 <= anchor && anchor < table.n, "triples_for_anchor: bad anchor");
  std::vector<int> partners;
  for (int j = 0; j < table.n; ++j)
    if (j != anchor && table.matched(anchor, j)) partners.push_back(j);

  std::vector<MatchTriple> out;
  int emitted = 0;
  for (std::size_t a = 0; a < partners.size(); ++a) {
    for (std::size_t b = a + 1; b < partners.size(); ++b) {
      if (emitted >= max_pairs) return out;
      const int i = partners[a], j = partners[b];
      MatchTriple t;
      t.ref_id = anchor;
      t.img_i = i;
      t.img_j = j;

      // chain ref<->i and ref<->j through shared reference features, then
      // verify the implied (i, j) correspondence against that pair's match
      // set (which counts as empty when the pair is below threshold)
      std::map<int, RefObs> mi = anchored_view(table, anchor, i);
      std::map<int, RefObs> mj = anchored_view(table, anchor, j);
      std::set<std::pair<int, int>> ij;
      if (table.matched(i, j))
        for (const auto& m : table.at(i, j)) ij.insert({m.ida, m.idb});

      for (const auto& [rid, oi] : mi) {
        auto it = mj.find(rid);
        if (it == mj.end()) continue;
        const RefObs& oj = it->second;
        if (!ij.count({oi.feat, oj.feat})) continue;
        t.matches.push_back({rid, oi.ur, oi.vr, oi.u, oi.v, oj.u, oj.v});
      }
      out.push_back(std::move(t));
      ++emitted;
    }
  }
  return out;
}

BuildResult build_triples(int n_images, const PairMatcher& matcher,
                          int max_pairs_per_anchor) {
  SANERF_CHECK(n_images >= 3, "build_triples: need at least 3 images");
  MatchTable table = build_match_table(n_images, matcher);
  BuildResult res;
  res.graph = graph_of(table);
  for (int a = 0; a < n_images; ++a) {
    auto ts = triples_for_anchor(table, a, max_pairs_per_anchor);
    for (auto& t : ts) res.triples.push_back(std::move(t));
  }
  return res;
}

int select_reference(const MatchGraph& graph) {
  SANERF_CHECK(graph.n > 0, "select_reference: empty graph");
  int best = -1;
  int best_m = 0;
  long long best_c = -1;
  for (int i = 0; i < graph.n; ++i) {
    int m = graph.matched_images(i);
    long long c = graph.correspondences(i);
    if (m > best_m || (m == best_m && m > 0 && c > best_c)) {
      best = i;
      best_m = m;
      best_c = c;
    }
  }
  SANERF_CHECK(best >= 0, "select_reference: no image has a matched pair");
  return best;
}

void save_matches(const std::string& path, const MatchTable& table) {
  std::ofstream f(path);
  if (!f.good()) throw IoError(strcat_("cannot open '", path, "' for writing"));
  json head = {{"kind", "sanerf-matches"}, {"version", 1}, {"n", table.n}};
  f << head.dump() << "\n";
  for (const auto& [key, matches] : table.pairs) {
    json rec;
    rec["i"] = key.first;
    rec["j"] = key.second;
    json ida = json::array(), idb = json::array();
    json uva = json::array(), uvb = json::array();
    for (const auto& m : matches) {
      ida.push_back(m.ida);
      idb.push_back(m.idb);
      uva.push_back({m.ua, m.va});
      uvb.push_back({m.ub, m.vb});
    }
    rec["ida"] = std::move(ida);
    rec["idb"] = std::move(idb);
    rec["uva"] = std::move(uva);
    rec["uvb"] = std::move(uvb);
    f << rec.dump() << "\n";
  }
  f.flush();
  if (!f.good()) throw IoError(strcat_("write to '", path, "' failed"));
}

MatchTable load_matches(const std::string& path) {
  std::ifstream f(path);
  if (!f.good()) throw IoError(strcat_("cannot open '", path, "'"));
  std::string line;
  if (!std::getline(f, line)) throw IoError(strcat_("'", path, "' is empty"));

  MatchTable table;
  try {
    json head = json::parse(line);
    if (head.value("kind", "") != "sanerf-matches")
      throw IoError(strcat_("'", path, "' is not a match cache"));
    table.n = head.at("n").get<int>();
    SANERF_CHECK(table.n >= 2, "match cache: bad image count");

    while (std::getline(f, line)) {
      if (line.empty()) continue;
      json rec = json::parse(line);
      int i = rec.at("i").get<int>(), j = rec.at("j").get<int>();
      SANERF_CHECK(0 <= i && i < j && j < table.n, "match cache: bad pair ids");
      SANERF_CHECK(!table.pairs.count({i, j}), "match cache: duplicate pair");
      const json& ida = rec.at("ida");
      const json& idb = rec.at("idb");
      const json& uva = rec.at("uva");
      const json& uvb = rec.at("uvb");
      const std::size_t m = ida.size();
      SANERF_CHECK(idb.size() == m && uva.size() == m && uvb.size() == m,
                   "match cache: ragged record");
      std::vector<PairMatch> ms(m);
      for (std::size_t t = 0; t < m; ++t) {
        ms[t].ida = ida[t].get<int>();
        ms[t].idb = idb[t].get<int>();
        ms[t].ua = uva[t].at(0).get<double>();
        ms[t].va = uva[t].at(1).get<double>();
        ms[t].ub = uvb[t].at(0).get<double>();
        ms[t].vb = uvb[t].at(1).get<double>();
      }
      table.pairs.emplace(std::make_pair(i, j), std::move(ms));
    }
  } catch (const json::exception& e) {
    throw IoError(strcat_("malformed match cache '", path, "': ", e.what()));
  }
  SANERF_CHECK(int(table.pairs.size()) == table.n * (table.n - 1) / 2,
               "match cache: incomplete pair coverage");
  return table;
}

}  // namespace sanerf::match
