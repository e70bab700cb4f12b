#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sanerf {

// Base error for every failure the library reports. Subtypes exist where
// callers are expected to branch on them.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

template <typename... Args>
std::string strcat_(Args&&... args) {
  std::string out;
  ((out += [&] {
     if constexpr (std::is_arithmetic_v<std::decay_t<Args>>)
       return std::to_string(args);
     else
       return std::string(args);
   }()),
   ...);
  return out;
}

#define SANERF_CHECK(cond, ...)                                   \
  do {                                                            \
    if (!(cond)) throw ::sanerf::Error(strcat_(__VA_ARGS__));     \
  } while (0)

#define SANERF_SHAPE_CHECK(cond, ...)                                  \
  do {                                                                 \
    if (!(cond)) throw ::sanerf::ShapeError(strcat_(__VA_ARGS__));     \
  } while (0)

}  // namespace sanerf
