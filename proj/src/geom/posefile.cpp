#include "geom/posefile.h"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace sanerf::geom {

void save_poses(const std::string& path, const std::vector<Pose>& poses,
                const std::string& header_comment) {
  std::ofstream os(path, std::ios::trunc);
  SANERF_CHECK(os.good(), "cannot open '", path, "' for writing");
  if (!header_comment.empty()) os << "# " << header_comment << "\n";
  os << "# r00 r01 r02 t0 r10 r11 r12 t1 r20 r21 r22 t2\n";
  char buf[32];
  for (const auto& p : poses) {
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", p.R(r, c));
        os << buf << ' ';
      }
      std::snprintf(buf, sizeof buf, "%.17g", p.t(r));
      os << buf << (r == 2 ? "" : " ");
    }
    os << "\n";
  }
  SANERF_CHECK(os.good(), "write to '", path, "' failed");
}

std::vector<Pose> load_poses(const std::string& path) {
  std::ifstream is(path);
  if (!is.good()) throw IoError(strcat_("cannot open pose file '", path, "'"));
  std::vector<Pose> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    double v[12];
    for (int i = 0; i < 12; ++i)
      SANERF_CHECK(bool(ss >> v[i]), path, ":", lineno,
                   ": expected 12 reals per pose line");
    double extra;
    SANERF_CHECK(!(ss >> extra), path, ":", lineno,
                 ": trailing values on pose line");
    Pose p;
    p.R << v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10];
    p.t << v[3], v[7], v[11];
    out.push_back(p);
  }
  return out;
}

}  // namespace sanerf::geom
