#pragma once

#include <charconv>
#include <string>

namespace sphereflow {

// Locale-independent float formatting.  All file output goes through these so
// reruns are byte-identical regardless of environment.
inline std::string fmt_sig(double v, int digits) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v,
                           std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

inline std::string fmt17(double v) { return fmt_sig(v, 17); }

}  // namespace sphereflow
