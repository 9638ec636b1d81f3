#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace pdlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Error taxonomy. Everything user-facing derives from Error so the CLI can
// catch one type and print a machine-readable line.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct NumericError : Error {
  using Error::Error;
};
struct FormatError : Error {
  using Error::Error;
};

inline double clip(double x, double lo, double hi) {
  return x < lo ? lo : (x > hi ? hi : x);
}

inline Vec clip(const Vec& v, double lo, double hi) {
  return v.cwiseMax(lo).cwiseMin(hi);
}

// The legal action box [-1, 1].
inline double clip(double x) { return clip(x, -1.0, 1.0); }
inline Vec clip(const Vec& v) { return clip(v, -1.0, 1.0); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

}  // namespace pdlab
