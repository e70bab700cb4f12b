#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "data/scene.h"
#include "match/features.h"

namespace sanerf::match {

// One correspondence between two images; ids identify the underlying feature
// on each side (detector: index into that image's feature list, oracle:
// ground-truth point id on both sides). Ids are what triple chaining keys on.
struct PairMatch {
  double ua = 0, va = 0, ub = 0, vb = 0;
  int ida = -1, idb = -1;
};

// mutual-nearest-neighbor matching with a two-sided ratio test
std::vector<PairMatch> match_features(const std::vector<Feature>& fa,
                                      const std::vector<Feature>& fb,
                                      double ratio = 0.8);

std::vector<PairMatch> detect_and_match_pair(const data::Image& a,
                                             const data::Image& b,
                                             const Detector& det,
                                             double ratio = 0.8);

// Produces the matches for an image pair (i < j). Implementations must be
// pure/thread-safe: pairs are matched in parallel.
using PairMatcher = std::function<std::vector<PairMatch>(int i, int j)>;

// detector-based matcher over a fixed image list; features are extracted once
// per image up front
PairMatcher image_matcher(const std::vector<data::Image>& images,
                          const Detector& det, double ratio = 0.8);

// ground-truth matcher for synthetic scenes: correspondences come from
// projecting known surface points, so they carry zero detector noise
PairMatcher oracle_matcher(const data::SceneDesc& scene,
                           const std::vector<data::GtPoint>& pts,
                           double margin = 1.0);

// a pair of images counts as matched when its correspondence count exceeds
// this (strictly)
constexpr int kPairMatchThreshold = 3;

// All pairwise match sets, keyed by (i, j) with i < j.
struct MatchTable {
  int n = 0;
  std::map<std::pair<int, int>, std::vector<PairMatch>> pairs;

  const std::vector<PairMatch>& at(int i, int j) const;  // requires i < j
  int count(int i, int j) const;                         // symmetric, 0 on diag
  bool matched(int i, int j) const { return count(i, j) > kPairMatchThreshold; }
};

MatchTable build_match_table(int n_images, const PairMatcher& matcher);

// Per-image connectivity statistics derived from a MatchTable.
struct MatchGraph {
  int n = 0;
  std::vector<std::vector<int>> pair_count;  // n x n, symmetric, zero diagonal

  int matched_images(int i) const;        // partners with count > threshold
  long long correspondences(int i) const;  // sum of counts over matched pairs
};

MatchGraph graph_of(const MatchTable& table);

// Correspondences shared by a reference image and two others.
struct MatchTriple {
  int ref_id = -1, img_i = -1, img_j = -1;  // img_i < img_j
  struct Obs {
    int ref_feat = -1;  // chaining key on the reference side
    double ur = 0, vr = 0, ui = 0, vi = 0, uj = 0, vj = 0;
  };
  std::vector<Obs> matches;
};

// Triples anchored at `anchor`: one per unordered pair of matched partners.
// An observation survives when ref<->i and ref<->j chain through the same
// reference feature AND the implied (i, j) correspondence is present in that
// pair's (thresholded) match set.
std::vector<MatchTriple> triples_for_anchor(const MatchTable& table, int anchor,
                                            int max_pairs = 1 << 30);

struct BuildResult {
  std::vector<MatchTriple> triples;  // all anchors, ordered (ref, i, j)
  MatchGraph graph;
};

BuildResult build_triples(int n_images, const PairMatcher& matcher,
                          int max_pairs_per_anchor = 1 << 30);

// Reference image: most matched partners, then most correspondences, then
// lowest index. Errors when no image has a matched partner.
int select_reference(const MatchGraph& graph);

// JSON-lines cache: a header line, then one record per pair
void save_matches(const std::string& path, const MatchTable& table);
MatchTable load_matches(const std::string& path);

}  // namespace sanerf::match
