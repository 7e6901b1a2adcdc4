#pragma once

#include <stdexcept>
#include <string>

namespace dualsvd {

/// The doubly-projected infinitesimal part has Frobenius norm above the
/// existence threshold: no CDSVD / DMPGI / dual rank decomposition exists.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, double residual, double threshold)
      : std::runtime_error(what), residual_(residual), threshold_(threshold) {}

  double residual() const { return residual_; }
  double threshold() const { return threshold_; }

 private:
  double residual_;
  double threshold_;
};

/// File-level failure (missing file, malformed CSV, write error).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dualsvd
