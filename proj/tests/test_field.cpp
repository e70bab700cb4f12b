#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "field/field.h"

using namespace sanerf;
using namespace sanerf::field;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> rand_unit_dirs(int n, Rng& rng) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    double x, y, z, s;
    do {
      x = rng.normal();
      y = rng.normal();
      z = rng.normal();
      s = std::sqrt(x * x + y * y + z * z);
    } while (s < 1e-6);
    out.insert(out.end(), {x / s, y / s, z / s});
  }
  return out;
}

FieldConfig tiny_config() {
  FieldConfig cfg;
  cfg.pos_bands = 4;
  cfg.dir_bands = 2;
  cfg.depth = 2;
  cfg.hidden = 16;
  cfg.skip_at = 1;
  cfg.color_hidden = 8;
  return cfg;
}

}  // namespace

TEST_CASE("encoding dimensions") {
  CHECK(encoding_dim(10, true) == 63);
  CHECK(encoding_dim(4, true) == 27);
  CHECK(encoding_dim(0, true) == 3);
  CHECK(encoding_dim(2, false) == 12);
}

TEST_CASE("encode values") {
  ad::Graph64 g;
  std::vector<double> x = {0, 0, 0, 0.5, -0.25, 1.0};
  auto enc = encode(g, g.constant({2, 3}, x), 3, true);
  REQUIRE(g.shape(enc).cols == 21);
  REQUIRE(g.shape(enc).rows == 2);
  const auto& v = g.val(enc);
  // row 0 (x = 0): zeros everywhere except the cosine slots
  for (int c = 0; c < 21; ++c) {
    bool cos_slot = c >= 3 && ((c - 3) / 3) % 2 == 1;
    CHECK(v[c] == (cos_slot ? 1.0 : 0.0));
  }
  // row 1: [x, sin(pi x), cos(pi x), sin(2 pi x), ..., cos(4 pi x)]
  for (int j = 0; j < 3; ++j) {
    double xj = x[3 + j];
    CHECK(v[21 + j] == xj);
    for (int k = 0; k < 3; ++k) {
      double f = kPi * std::pow(2.0, k);
      CHECK(v[21 + 3 + 6 * k + j] == doctest::Approx(std::sin(f * xj)).epsilon(1e-12));
      CHECK(v[21 + 6 + 6 * k + j] == doctest::Approx(std::cos(f * xj)).epsilon(1e-12));
    }
  }

  // L=0 with input kept: identity
  auto id = encode(g, g.constant({2, 3}, x), 0, true);
  REQUIRE(g.shape(id).cols == 3);
  CHECK(g.val(id) == x);

  // without the raw input the first slots are the first sine band
  auto no_in = encode(g, g.constant({2, 3}, x), 2, false);
  REQUIRE(g.shape(no_in).cols == 12);
  CHECK(g.val(no_in)[3 + 0] == doctest::Approx(std::sin(kPi * 0.5)).epsilon(1e-12));

  // scale premultiplies the coordinates; rows are 9 wide at L=1
  auto sc = encode(g, g.constant({2, 3}, x), 1, true, 2.0);
  REQUIRE(g.shape(sc).cols == 9);
  CHECK(g.val(sc)[9] == 1.0);  // 2 * 0.5
  CHECK(g.val(sc)[9 + 3] == doctest::Approx(std::sin(kPi * 1.0)).epsilon(1e-9));
}

TEST_CASE("parameter shapes and init") {
  Field f(FieldConfig{}, "coarse.");
  auto specs = f.param_specs();
  REQUIRE(specs.size() == 16);  // 4 trunk layers + 4 head layers, w+b each
  CHECK(specs[0].name == "coarse.w0");
  CHECK(specs[0].shape == ad::Shape{63, 64});
  CHECK(specs[1].shape == ad::Shape{1, 64});
  CHECK(specs[4].name == "coarse.w2");
  CHECK(specs[4].shape == ad::Shape{127, 64});  // skip layer sees 64+63
  CHECK(specs[8].name == "coarse.wsigma");
  CHECK(specs[8].shape == ad::Shape{64, 1});
  CHECK(specs[12].name == "coarse.wc0");
  CHECK(specs[12].shape == ad::Shape{64 + 27, 32});
  CHECK(specs[14].name == "coarse.wc1");
  CHECK(specs[14].shape == ad::Shape{32, 3});

  FieldConfig sep;
  sep.separate_heads = true;
  CHECK(Field(sep, "x.").param_specs().size() == 24);

  ad::ParamStore32 store;
  Rng rng(5);
  f.init(store, rng);
  CHECK(store.count() == 16);
  double lim0 = std::sqrt(6.0 / (63 + 64));
  for (float v : store.at("coarse.w0").value) {
    CHECK(std::abs(v) <= lim0);
  }
  for (float v : store.at("coarse.b1").value) CHECK(v == 0.f);
  bool any_nonzero = false;
  for (float v : store.at("coarse.wc1").value) any_nonzero |= v != 0.f;
  CHECK(any_nonzero);

  // re-init is a no-op; a second field with its own prefix coexists
  auto w0 = store.at("coarse.w0").value;
  Rng rng2(99);
  f.init(store, rng2);
  CHECK(store.at("coarse.w0").value == w0);
  Field fine(FieldConfig{}, "fine.");
  fine.init(store, rng2);
  CHECK(store.count() == 32);
  CHECK(store.at("fine.w0").value != store.at("coarse.w0").value);

  // deterministic given the seed
  ad::ParamStore32 store2;
  Rng rng3(5);
  f.init(store2, rng3);
  CHECK(store2.at("coarse.w0").value == store.at("coarse.w0").value);

  // config mismatch against stored shapes is an error
  FieldConfig other;
  other.hidden = 32;
  CHECK_THROWS_AS(Field(other, "coarse.").init(store, rng2), Error);
}

TEST_CASE("output ranges over random inputs") {
  Field f(tiny_config(), "f.");
  ad::ParamStore32 store;
  Rng rng(17);
  f.init(store, rng);

  const std::size_t n = 10000;
  std::vector<float> pos;
  for (std::size_t i = 0; i < n * 3; ++i) pos.push_back(float(rng.uniform(-3, 3)));
  Rng drng(18);
  auto dirs_d = rand_unit_dirs(int(n), drng);
  std::vector<float> dirs(dirs_d.begin(), dirs_d.end());

  ad::Graph32 g;
  auto out = f.evaluate(g, store, g.constant({n, 3}, pos),
                        g.constant({n, 3}, dirs));
  REQUIRE(g.shape(out.sigma) == ad::Shape{n, 1});
  REQUIRE(g.shape(out.rgb) == ad::Shape{n, 3});
  for (float s : g.val(out.sigma)) {
    REQUIRE(std::isfinite(s));
    REQUIRE(s >= 0.f);
  }
  for (float c : g.val(out.rgb)) {
    REQUIRE(std::isfinite(c));
    REQUIRE(c > 0.f);
    REQUIRE(c < 1.f);
  }
}

TEST_CASE("density ignores view direction") {
  for (bool sep : {false, true}) {
    auto cfg = tiny_config();
    cfg.separate_heads = sep;
    Field f(cfg, "f.");
    ad::ParamStore32 store;
    Rng rng(23);
    f.init(store, rng);

    // one position replicated against 100 random directions
    const std::size_t n = 100;
    std::vector<float> pos;
    for (std::size_t i = 0; i < n; ++i) pos.insert(pos.end(), {0.31f, -0.7f, 1.2f});
    Rng drng(29);
    auto dirs_d = rand_unit_dirs(int(n), drng);
    std::vector<float> dirs(dirs_d.begin(), dirs_d.end());

    ad::Graph32 g;
    auto out = f.evaluate(g, store, g.constant({n, 3}, pos),
                          g.constant({n, 3}, dirs));
    const auto& sig = g.val(out.sigma);
    for (std::size_t i = 1; i < n; ++i) CHECK(sig[i] == sig[0]);  // exactly zero spread
    // while color does depend on direction
    const auto& rgb = g.val(out.rgb);
    bool differs = false;
    for (std::size_t i = 1; i < n; ++i) differs |= rgb[i * 3] != rgb[0];
    CHECK(differs);
  }
}

TEST_CASE("field gradients match finite differences") {
  auto cfg = tiny_config();
  Field f(cfg, "f.");
  ad::ParamStore32 store32;
  Rng rng(31);
  f.init(store32, rng);
  auto store = ad::cast_store<double>(store32);

  std::vector<double> x0 = {0.2, -0.4, 0.9};
  std::vector<double> dir = {0.36, 0.48, 0.8};

  // scalar objective mixing sigma and all three color channels
  auto build = [&](ad::Graph64& g, const ad::ParamStore<double>& st) {
    auto out = f.evaluate(g, st, g.param("x", {1, 3}, x0.data()),
                          g.constant({1, 3}, dir));
    std::vector<double> wc = {0.7, -1.3, 0.4};
    auto mixed = g.sum(g.mul(out.rgb, g.constant({1, 3}, wc)));
    return g.add(out.sigma, mixed);
  };

  ad::Graph64 g;
  auto loss = build(g, store);
  g.backward(loss);

  auto eval_at = [&](const ad::ParamStore<double>& st) {
    ad::Graph64 gg;
    return gg.val(build(gg, st))[0];
  };

  const double h = 1e-5;
  // d loss / d x
  const ad::Buf<double>* gx = nullptr;
  for (const auto& [name, ref] : g.params())
    if (name == "x") gx = g.grad(ref);
  REQUIRE(gx != nullptr);
  for (int j = 0; j < 3; ++j) {
    double keep = x0[j];
    x0[j] = keep + h;
    double up = eval_at(store);
    x0[j] = keep - h;
    double dn = eval_at(store);
    x0[j] = keep;
    double fd = (up - dn) / (2 * h);
    double rel = std::abs(fd - (*gx)[j]) /
                 std::max({std::abs(fd), std::abs((*gx)[j]), 1e-6});
    CHECK(rel < 1e-4);
  }

  // d loss / d weights, spot-checked across every parameter tensor
  Rng pick(37);
  for (const auto& [name, ref] : g.params()) {
    if (name == "x") continue;
    const auto* gw = g.grad(ref);
    REQUIRE(gw != nullptr);
    auto& entry = store.at(name);
    for (int probe = 0; probe < 3; ++probe) {
      std::size_t j = pick.below(entry.value.size());
      double keep = entry.value[j];
      entry.value[j] = keep + h;
      double up = eval_at(store);
      entry.value[j] = keep - h;
      double dn = eval_at(store);
      entry.value[j] = keep;
      double fd = (up - dn) / (2 * h);
      double rel = std::abs(fd - (*gw)[j]) /
                   std::max({std::abs(fd), std::abs((*gw)[j]), 1e-6});
      CHECK(rel < 1e-4);
    }
  }
}
