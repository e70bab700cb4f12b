#include "field/field.h"

#include <cmath>
#include <numbers>

namespace sanerf::field {

int encoding_dim(int bands, bool include_input) {
  return 3 * ((include_input ? 1 : 0) + 2 * bands);
}

template <typename T>
typename ad::Graph<T>::Ref encode(ad::Graph<T>& g,
                                  typename ad::Graph<T>::Ref x, int bands,
                                  bool include_input, T scale) {
  SANERF_CHECK(bands > 0 || include_input, "encode: empty encoding");
  SANERF_SHAPE_CHECK(g.shape(x).cols == 3, "encode: expected (N,3), got cols ",
                     g.shape(x).cols);
  auto xs = scale == T(1) ? x : g.affine(x, scale, T(0));
  int enc = include_input ? xs : -1;
  T freq = T(std::numbers::pi);
  for (int k = 0; k < bands; ++k, freq *= T(2)) {
    auto ang = g.affine(xs, freq, T(0));
    auto s = g.sin(ang);
    enc = enc < 0 ? s : g.concat_cols(enc, s);
    enc = g.concat_cols(enc, g.cos(ang));
  }
  return enc;
}

template ad::Graph<float>::Ref encode<float>(ad::Graph<float>&, int, int, bool,
                                             float);
template ad::Graph<double>::Ref encode<double>(ad::Graph<double>&, int, int,
                                               bool, double);

Field::Field(FieldConfig cfg, std::string prefix)
    : cfg_(cfg), prefix_(std::move(prefix)) {
  SANERF_CHECK(cfg_.depth >= 1 && cfg_.hidden >= 1 && cfg_.color_hidden >= 1,
               "field: bad architecture");
  SANERF_CHECK(cfg_.skip_at < cfg_.depth, "field: skip_at beyond last layer");
}

std::vector<Field::ParamSpec> Field::param_specs() const {
  std::vector<ParamSpec> out;
  int enc_p = encoding_dim(cfg_.pos_bands, cfg_.include_input);
  int enc_d = encoding_dim(cfg_.dir_bands, cfg_.include_input);
  auto layer = [&](const std::string& name, int in, int width) {
    out.push_back({prefix_ + "w" + name, {std::size_t(in), std::size_t(width)},
                   in, width});
    out.push_back({prefix_ + "b" + name, {1, std::size_t(width)}, in, width});
  };
  auto trunk = [&](const std::string& sub) {
    for (int l = 0; l < cfg_.depth; ++l) {
      int in = l == 0 ? enc_p : cfg_.hidden;
      if (l == cfg_.skip_at && l > 0) in += enc_p;
      layer(sub + std::to_string(l), in, cfg_.hidden);
    }
  };
  if (cfg_.separate_heads) {
    trunk("s.");
    trunk("c.");
  } else {
    trunk("");
  }
  layer("sigma", cfg_.hidden, 1);
  layer("feat", cfg_.hidden, cfg_.hidden);
  layer("c0", cfg_.hidden + enc_d, cfg_.color_hidden);
  layer("c1", cfg_.color_hidden, 3);
  return out;
}

void Field::init(ad::ParamStore<float>& store, Rng& rng) const {
  auto specs = param_specs();
  if (store.contains(specs.front().name)) {
    for (const auto& s : specs)
      SANERF_CHECK(store.contains(s.name) && store.at(s.name).shape == s.shape,
                   "field '", prefix_, "': stored params do not match config");
    return;
  }
  for (const auto& s : specs) {
    auto& e = store.create(s.name, s.shape);
    if (s.shape.rows == 1 && s.name[prefix_.size()] == 'b') continue;  // bias
    double lim = std::sqrt(6.0 / double(s.fan_in + s.fan_out));
    for (auto& v : e.value) v = float(rng.uniform(-lim, lim));
  }
}

template <typename T>
FieldOut<T> Field::evaluate(ad::Graph<T>& g, const ad::ParamStore<T>& store,
                            typename ad::Graph<T>::Ref pos,
                            typename ad::Graph<T>::Ref dir) const {
  SANERF_SHAPE_CHECK(g.shape(pos).cols == 3 && g.shape(dir).cols == 3 &&
                         g.shape(pos).rows == g.shape(dir).rows,
                     "field: pos/dir must both be (N,3)");
  auto ep = encode(g, pos, cfg_.pos_bands, cfg_.include_input,
                   T(cfg_.pos_scale));
  auto ed = encode(g, dir, cfg_.dir_bands, cfg_.include_input);

  auto lin = [&](int x, const std::string& tag) {
    return g.add_rowvec(g.matmul(x, store.leaf(g, prefix_ + "w" + tag)),
                        store.leaf(g, prefix_ + "b" + tag));
  };
  auto trunk = [&](const std::string& sub) {
    int h = ep;
    for (int l = 0; l < cfg_.depth; ++l) {
      if (l == cfg_.skip_at && l > 0) h = g.concat_cols(h, ep);
      h = g.relu(lin(h, sub + std::to_string(l)));
    }
    return h;
  };

  int h_sigma, h_color;
  if (cfg_.separate_heads) {
    h_sigma = trunk("s.");
    h_color = trunk("c.");
  } else {
    h_sigma = h_color = trunk("");
  }

  FieldOut<T> out;
  out.sigma =
      g.softplus(g.affine(lin(h_sigma, "sigma"), T(1), T(cfg_.density_bias)));
  auto feat = lin(h_color, "feat");
  auto hc = g.relu(lin(g.concat_cols(feat, ed), "c0"));
  out.rgb = g.sigmoid(lin(hc, "c1"));
  return out;
}

template FieldOut<float> Field::evaluate<float>(ad::Graph<float>&,
                                                const ad::ParamStore<float>&,
                                                int, int) const;
template FieldOut<double> Field::evaluate<double>(
    ad::Graph<double>&, const ad::ParamStore<double>&, int, int) const;

}  // namespace sanerf::field
