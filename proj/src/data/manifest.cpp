#include "data/manifest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "core/common.h"
#include "geom/posefile.h"
#include "json.hpp"

namespace sanerf::data {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const char* kind_name(TextureSpec::Kind k) {
  switch (k) {
    case TextureSpec::Kind::kFlat: return "flat";
    case TextureSpec::Kind::kChecker: return "checker";
    case TextureSpec::Kind::kNoise: return "noise";
    case TextureSpec::Kind::kGradient: return "gradient";
  }
  return "flat";
}

TextureSpec::Kind kind_from(const std::string& s) {
  if (s == "flat") return TextureSpec::Kind::kFlat;
  if (s == "checker") return TextureSpec::Kind::kChecker;
  if (s == "noise") return TextureSpec::Kind::kNoise;
  if (s == "gradient") return TextureSpec::Kind::kGradient;
  throw IoError(strcat_("unknown texture kind '", s, "'"));
}

json vec3_to_json(const geom::Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
geom::Vec3 vec3_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

json tex_to_json(const TextureSpec& t) {
  return json{{"kind", kind_name(t.kind)},
              {"c0", json::array({t.c0.x(), t.c0.y(), t.c0.z()})},
              {"c1", json::array({t.c1.x(), t.c1.y(), t.c1.z()})},
              {"scale", t.scale},
              {"seed", t.seed}};
}

TextureSpec tex_from(const json& j) {
  TextureSpec t;
  t.kind = kind_from(j.at("kind").get<std::string>());
  const auto& c0 = j.at("c0");
  const auto& c1 = j.at("c1");
  t.c0 = {c0.at(0).get<float>(), c0.at(1).get<float>(), c0.at(2).get<float>()};
  t.c1 = {c1.at(0).get<float>(), c1.at(1).get<float>(), c1.at(2).get<float>()};
  t.scale = j.at("scale").get<float>();
  t.seed = j.at("seed").get<std::uint32_t>();
  return t;
}

json box_to_json(const BoxObj& b) {
  return json{{"lo", vec3_to_json(b.lo)}, {"hi", vec3_to_json(b.hi)}, {"tex", tex_to_json(b.tex)}};
}

BoxObj box_from(const json& j) {
  BoxObj b;
  b.lo = vec3_from(j.at("lo"));
  b.hi = vec3_from(j.at("hi"));
  b.tex = tex_from(j.at("tex"));
  return b;
}

std::string image_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "im_%03d.png", i);
  return buf;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  SANERF_CHECK(f.good(), strcat_("cannot open '", path, "' for writing"));
  f << body;
  SANERF_CHECK(f.good(), strcat_("write to '", path, "' failed"));
}

json slurp_json(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f.good()) throw IoError(strcat_("cannot open '", path, "'"));
  json j = json::parse(f, nullptr, false);
  if (j.is_discarded()) throw IoError(strcat_("'", path, "' is not valid JSON"));
  return j;
}

}  // namespace

bool is_test_index(int i) { return i % 8 == 0; }

Dataset write_dataset(const std::string& dir, const GenConfig& cfg,
                      const std::string& name) {
  Dataset ds;
  ds.name = name;
  ds.scene = generate_scene(cfg);
  ds.gt_points = sample_surface_points(ds.scene, cfg.gt_points, cfg.seed + 101);

  fs::create_directories(fs::path(dir) / "images");

  json images = json::array();
  for (int i = 0; i < cfg.n_images; ++i) {
    ds.images.push_back(render_scene(ds.scene, ds.scene.cams[i], ds.scene.intr));
    std::string file = std::string("images/") + image_name(i);
    save_png((fs::path(dir) / file).string(), ds.images.back());
    bool test = is_test_index(i);
    (test ? ds.test_idx : ds.train_idx).push_back(i);
    images.push_back(json{{"file", file}, {"split", test ? "test" : "train"}});
  }

  geom::save_poses((fs::path(dir) / "poses_gt.txt").string(), ds.scene.cams,
                   "ground-truth camera-to-world poses");

  json pts = json::array();
  for (const auto& p : ds.gt_points)
    pts.push_back(json{{"id", p.id}, {"xyz", vec3_to_json(p.xyz)}});
  write_text((fs::path(dir) / "gt_points.json").string(),
             json{{"points", pts}}.dump(2) + "\n");

  json spheres = json::array();
  for (const auto& s : ds.scene.spheres)
    spheres.push_back(json{{"center", vec3_to_json(s.center)},
                           {"radius", s.radius},
                           {"tex", tex_to_json(s.tex)}});
  json boxes = json::array();
  for (const auto& b : ds.scene.boxes) boxes.push_back(box_to_json(b));

  json m{{"name", name},
         {"generator",
          {{"seed", cfg.seed},
           {"n_images", cfg.n_images},
           {"width", cfg.width},
           {"height", cfg.height},
           {"fov_deg", cfg.fov_deg},
           {"n_spheres", cfg.n_spheres},
           {"n_boxes", cfg.n_boxes},
           {"room", cfg.room},
           {"layout", cfg.layout},
           {"arc_deg", cfg.arc_deg},
           {"radius", cfg.radius},
           {"gt_points", cfg.gt_points},
           {"texture_scale", cfg.texture_scale}}},
         {"intrinsics",
          {{"width", ds.scene.intr.width},
           {"height", ds.scene.intr.height},
           {"fx", ds.scene.intr.fx},
           {"fy", ds.scene.intr.fy},
           {"cx", ds.scene.intr.cx},
           {"cy", ds.scene.intr.cy}}},
         {"near", ds.scene.near},
         {"far", ds.scene.far},
         {"diameter", ds.scene.diameter},
         {"seed", ds.scene.seed},
         {"spheres", spheres},
         {"boxes", boxes},
         {"room", ds.scene.room ? box_to_json(*ds.scene.room) : json(nullptr)},
         {"images", images},
         {"poses_file", "poses_gt.txt"},
         {"points_file", "gt_points.json"}};
  write_text((fs::path(dir) / "manifest.json").string(), m.dump(2) + "\n");
  return ds;
}

Dataset load_dataset(const std::string& dir) {
  json m = slurp_json((fs::path(dir) / "manifest.json").string());
  Dataset ds;
  try {
    ds.name = m.at("name").get<std::string>();
    const auto& ji = m.at("intrinsics");
    ds.scene.intr.width = ji.at("width").get<int>();
    ds.scene.intr.height = ji.at("height").get<int>();
    ds.scene.intr.fx = ji.at("fx").get<double>();
    ds.scene.intr.fy = ji.at("fy").get<double>();
    ds.scene.intr.cx = ji.at("cx").get<double>();
    ds.scene.intr.cy = ji.at("cy").get<double>();
    ds.scene.near = m.at("near").get<double>();
    ds.scene.far = m.at("far").get<double>();
    ds.scene.diameter = m.at("diameter").get<double>();
    ds.scene.seed = m.at("seed").get<std::uint64_t>();
    for (const auto& js : m.at("spheres")) {
      SphereObj s;
      s.center = vec3_from(js.at("center"));
      s.radius = js.at("radius").get<double>();
      s.tex = tex_from(js.at("tex"));
      ds.scene.spheres.push_back(s);
    }
    for (const auto& jb : m.at("boxes")) ds.scene.boxes.push_back(box_from(jb));
    if (!m.at("room").is_null()) ds.scene.room = box_from(m.at("room"));

    ds.scene.cams = geom::load_poses(
        (fs::path(dir) / m.at("poses_file").get<std::string>()).string());

    json jpts = slurp_json(
        (fs::path(dir) / m.at("points_file").get<std::string>()).string());
    for (const auto& jp : jpts.at("points")) {
      GtPoint p;
      p.id = jp.at("id").get<int>();
      p.xyz = vec3_from(jp.at("xyz"));
      ds.gt_points.push_back(p);
    }

    int i = 0;
    for (const auto& jim : m.at("images")) {
      ds.images.push_back(load_png((fs::path(dir) / jim.at("file").get<std::string>()).string()));
      std::string split = jim.at("split").get<std::string>();
      SANERF_CHECK(split == "train" || split == "test",
                   strcat_("bad split '", split, "' in manifest"));
      (split == "test" ? ds.test_idx : ds.train_idx).push_back(i);
      ++i;
    }
  } catch (const json::exception& e) {
    throw IoError(strcat_("malformed manifest in '", dir, "': ", e.what()));
  }
  SANERF_CHECK(int(ds.scene.cams.size()) == int(ds.images.size()),
               "pose file and image list disagree");
  return ds;
}

}  // namespace sanerf::data
