#include "dualsvd/dual_scalar.hpp"

#include <cmath>
#include <cstdio>
#include <regex>
#include <stdexcept>

namespace dualsvd {

namespace {

void require_finite(double value, const char* part) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument(std::string("dual scalar ") + part + " part is not finite");
  }
}

}  // namespace

DualScalar::DualScalar(double s, double i) : standard(s), infinitesimal(i) {
  require_finite(s, "standard");
  require_finite(i, "infinitesimal");
}

DualScalar operator/(const DualScalar& a, const DualScalar& b) {
  if (!is_appreciable(b)) {
    throw std::domain_error("division by an infinitesimal dual number: no inverse exists");
  }
  double s = a.standard / b.standard;
  double i = (a.infinitesimal * b.standard - a.standard * b.infinitesimal) /
             (b.standard * b.standard);
  return DualScalar(s, i);
}

bool is_appreciable(const DualScalar& p) { return std::abs(p.standard) > kAppreciableTol; }

bool dual_less_than(const DualScalar& p, const DualScalar& q) { return p < q; }

bool dual_positive(const DualScalar& p) { return DualScalar(0.0, 0.0) < p; }

std::string to_string(const DualScalar& p, int precision) {
  char buf[64];
  std::string out;
  std::snprintf(buf, sizeof buf, "%.*g", precision, p.standard);
  out += buf;
  out += std::signbit(p.infinitesimal) ? '-' : '+';
  std::snprintf(buf, sizeof buf, "%.*g", precision, std::abs(p.infinitesimal));
  out += buf;
  out += "ε";
  return out;
}

DualScalar parse_dual_scalar(std::string_view text) {
  static const std::regex pattern(
      R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*)"
      R"((?:([+-])\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*)"
      "ε"
      R"()?\s*$)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(text.begin(), text.end(), m, pattern)) {
    throw std::invalid_argument("cannot parse dual scalar: \"" + std::string(text) + "\"");
  }
  double s = std::stod(m[1].str());
  double i = 0.0;
  if (m[2].matched) {
    i = std::stod(m[3].str());
    if (m[2].str() == "-") i = -i;
  }
  return DualScalar(s, i);
}

DualComplexScalar::DualComplexScalar(std::complex<double> s, std::complex<double> i)
    : standard(s), infinitesimal(i) {
  require_finite(s.real(), "standard");
  require_finite(s.imag(), "standard");
  require_finite(i.real(), "infinitesimal");
  require_finite(i.imag(), "infinitesimal");
}

DualComplexScalar conj(const DualComplexScalar& p) {
  return DualComplexScalar(std::conj(p.standard), std::conj(p.infinitesimal));
}

}  // namespace dualsvd
