#include "core/rng.h"

#include <bit>
#include <sstream>

#include "core/common.h"

namespace sanerf {

std::string Rng::serialize() const {
  std::ostringstream os;
  os << eng_ << " " << (has_cache_ ? 1 : 0) << " "
     << std::bit_cast<uint64_t>(cache_);
  return os.str();
}

Rng Rng::deserialize(const std::string& s) {
  Rng r;
  std::istringstream is(s);
  is >> r.eng_;
  int flag = 0;
  uint64_t bits = 0;
  is >> flag >> bits;
  SANERF_CHECK(!is.fail(), "rng: malformed serialized state");
  r.has_cache_ = flag != 0;
  r.cache_ = std::bit_cast<double>(bits);
  return r;
}

}  // namespace sanerf
