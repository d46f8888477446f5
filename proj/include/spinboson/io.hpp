#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "spinboson/types.hpp"

namespace spinboson {

/// 17 significant digits; non-finite values become quoted JSON strings.
inline std::string json_number(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  if (x == 0.0) x = 0.0;  // drop the sign of negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string json_complex(Complex z) { return "[" + json_number(z.real()) + ", " + json_number(z.imag()) + "]"; }

/// Row-major array of rows, each entry an [re, im] pair.
inline void write_matrix_json(std::ostream& os, const DenseMatrix& m) {
  os << "[";
  for (Index r = 0; r < m.rows(); ++r) {
    os << (r ? ",\n [" : "[");
    for (Index c = 0; c < m.cols(); ++c) os << (c ? ", " : "") << json_complex(m(r, c));
    os << "]";
  }
  os << "]\n";
}

inline void write_matrix_json(std::ostream& os, const ComplexMatrix& m) { write_matrix_json(os, DenseMatrix(m)); }

}  // namespace spinboson
