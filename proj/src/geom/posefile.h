#pragma once

#include <string>
#include <vector>

#include "geom/geometry.h"

namespace sanerf::geom {

// Plain-text pose files: one camera-to-world pose per line as 12 reals,
// row-major [R | t] (r00 r01 r02 t0 r10 ... t2). Lines starting with '#' and
// blank lines are ignored. Values are written with enough digits to
// round-trip doubles exactly.
void save_poses(const std::string& path, const std::vector<Pose>& poses,
                const std::string& header_comment = "");
std::vector<Pose> load_poses(const std::string& path);

}  // namespace sanerf::geom
