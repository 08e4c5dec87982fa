#pragma once

#include <stdexcept>
#include <string>

namespace involute {

// Splits the coordinates of R^n x R^m into base variables x1..xn and fiber
// variables u1..um. All polynomial objects carry their split; mixing splits
// is a hard error at the point of use.
struct VarSplit {
  int n = 0;
  int m = 0;

  VarSplit() = default;
  VarSplit(int n_, int m_) : n(n_), m(m_) {
    if (n < 0 || m < 0 || n + m < 1)
      throw std::invalid_argument("VarSplit: need n, m >= 0 and n + m >= 1");
  }

  int total() const { return n + m; }

  bool operator==(const VarSplit& o) const { return n == o.n && m == o.m; }
  bool operator!=(const VarSplit& o) const { return !(*this == o); }

  bool is_base(int idx) const { return idx >= 0 && idx < n; }
  bool is_fiber(int idx) const { return idx >= n && idx < n + m; }

  std::string var_name(int idx) const {
    if (idx < 0 || idx >= total())
      throw std::out_of_range("VarSplit: variable index out of range");
    if (idx < n) return "x" + std::to_string(idx + 1);
    return "u" + std::to_string(idx - n + 1);
  }

  std::string str() const {
    return "(" + std::to_string(n) + ", " + std::to_string(m) + ")";
  }
};

inline void require_same_split(const VarSplit& a, const VarSplit& b, const char* where) {
  if (a != b)
    throw std::invalid_argument(std::string(where) + ": split mismatch " + a.str() +
                                " vs " + b.str());
}

}  // namespace involute
