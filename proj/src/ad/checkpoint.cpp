#include "ad/checkpoint.h"

#include <cstring>
#include <fstream>
#include <vector>

#include "json.hpp"

namespace sanerf::ad {
namespace {

constexpr char kMagic[8] = {'S', 'A', 'N', 'E', 'R', 'F', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void put_bytes(std::ostream& os, const void* p, std::size_t n) {
  os.write(reinterpret_cast<const char*>(p), std::streamsize(n));
}

void get_bytes(std::istream& is, void* p, std::size_t n) {
  is.read(reinterpret_cast<char*>(p), std::streamsize(n));
  SANERF_CHECK(bool(is), "checkpoint: truncated read of ", n, " bytes");
}

}  // namespace

void save_checkpoint(const std::string& path, const ParamStore<float>& store,
                     const CheckpointMeta& meta) {
  nlohmann::json tensors = nlohmann::json::array();
  std::uint64_t offset = 0;
  std::vector<std::pair<const float*, std::size_t>> blobs;
  auto add = [&](const std::string& name, const char* kind, const Shape& s,
                 const std::vector<float>& data) {
    tensors.push_back({{"name", name},
                       {"kind", kind},
                       {"rows", s.rows},
                       {"cols", s.cols},
                       {"offset", offset}});
    blobs.emplace_back(data.data(), data.size());
    offset += data.size() * sizeof(float);
  };
  for (const auto& [name, e] : store.all()) {
    add(name, "value", e.shape, e.value);
    if (!e.m.empty()) {
      add(name, "m", e.shape, e.m);
      add(name, "v", e.shape, e.v);
    }
  }
  nlohmann::json index = {{"step", meta.step},
                          {"adam_t", meta.adam_t},
                          {"rng", meta.rng_state},
                          {"config", meta.config_json},
                          {"tensors", tensors}};
  std::string js = index.dump();

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  SANERF_CHECK(os.good(), "checkpoint: cannot open '", path, "' for writing");
  put_bytes(os, kMagic, 8);
  put_bytes(os, &kVersion, 4);
  std::uint64_t jlen = js.size();
  put_bytes(os, &jlen, 8);
  put_bytes(os, js.data(), js.size());
  for (const auto& [p, n] : blobs) put_bytes(os, p, n * sizeof(float));
  os.flush();
  SANERF_CHECK(os.good(), "checkpoint: write to '", path, "' failed");
}

CheckpointMeta load_checkpoint(const std::string& path,
                               ParamStore<float>& store) {
  std::ifstream is(path, std::ios::binary);
  if (!is.good()) throw IoError(strcat_("checkpoint: cannot open '", path, "'"));
  char magic[8];
  get_bytes(is, magic, 8);
  SANERF_CHECK(std::memcmp(magic, kMagic, 8) == 0,
               "checkpoint: bad magic in '", path, "'");
  std::uint32_t version = 0;
  get_bytes(is, &version, 4);
  SANERF_CHECK(version == kVersion, "checkpoint: unsupported version ", version);
  std::uint64_t jlen = 0;
  get_bytes(is, &jlen, 8);
  std::string js(jlen, '\0');
  get_bytes(is, js.data(), jlen);
  nlohmann::json index;
  try {
    index = nlohmann::json::parse(js);
  } catch (const std::exception& e) {
    throw IoError(strcat_("checkpoint: bad index json: ", e.what()));
  }

  std::vector<char> data((std::istreambuf_iterator<char>(is)),
                         std::istreambuf_iterator<char>());

  store.clear();
  CheckpointMeta meta;
  meta.step = index.at("step").get<std::uint64_t>();
  meta.adam_t = index.at("adam_t").get<std::int64_t>();
  meta.rng_state = index.at("rng").get<std::string>();
  meta.config_json = index.at("config").get<std::string>();

  for (const auto& t : index.at("tensors")) {
    std::string name = t.at("name").get<std::string>();
    std::string kind = t.at("kind").get<std::string>();
    Shape shape{t.at("rows").get<std::size_t>(), t.at("cols").get<std::size_t>()};
    std::uint64_t off = t.at("offset").get<std::uint64_t>();
    std::size_t bytes = shape.numel() * sizeof(float);
    SANERF_CHECK(off + bytes <= data.size(), "checkpoint: tensor '", name,
                 "' out of bounds");
    std::vector<float> buf(shape.numel());
    std::memcpy(buf.data(), data.data() + off, bytes);
    if (kind == "value") {
      auto& e = store.create(name, shape);
      e.value = std::move(buf);
    } else {
      SANERF_CHECK(kind == "m" || kind == "v", "checkpoint: unknown tensor kind '",
                   kind, "'");
      auto& e = store.at(name);
      SANERF_CHECK(e.shape == shape, "checkpoint: moment shape mismatch for '",
                   name, "'");
      (kind == "m" ? e.m : e.v) = std::move(buf);
    }
  }
  return meta;
}

}  // namespace sanerf::ad
