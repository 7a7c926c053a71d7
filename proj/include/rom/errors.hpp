#pragma once

#include <stdexcept>
#include <string>

namespace rom {

/// Bad configuration or command usage (CLI exit code 2).
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system or file format problem (CLI exit code 3).
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: divergence, broken spectral symmetry, SVD
/// non-convergence (CLI exit code 4).
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rom
