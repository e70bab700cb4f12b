#pragma once

#include <cstdint>
#include <string>

#include "ad/params.h"

namespace sanerf::ad {

// Checkpoint container: magic + version, a JSON index (sorted tensor names,
// shapes, byte offsets, trainer bookkeeping), then raw little-endian float32
// arrays. Adam moments are included so resuming reproduces training exactly;
// save -> load -> save is byte-identical.
struct CheckpointMeta {
  std::uint64_t step = 0;
  std::int64_t adam_t = 0;
  std::string rng_state;
  std::string config_json = "{}";  // effective-config echo, stored verbatim
};

void save_checkpoint(const std::string& path, const ParamStore<float>& store,
                     const CheckpointMeta& meta);

// replaces the store contents
CheckpointMeta load_checkpoint(const std::string& path, ParamStore<float>& store);

}  // namespace sanerf::ad
