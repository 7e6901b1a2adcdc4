#pragma once

#include <compare>
#include <complex>
#include <string>
#include <string_view>

namespace dualsvd {

/// Absolute tolerance on the standard part below which a dual number is
/// treated as infinitesimal (and therefore non-invertible).
inline constexpr double kAppreciableTol = 1e-12;

/// A dual number p_s + p_i*eps with eps != 0 and eps^2 = 0.
///
/// Values are immutable in spirit: every operation returns a new value.
/// Comparison operators implement the total order
///   p < q  iff  p_s < q_s, or p_s = q_s and p_i < q_i,
/// which the defaulted lexicographic comparison provides directly.
struct DualScalar {
  double standard = 0.0;
  double infinitesimal = 0.0;

  DualScalar() = default;
  DualScalar(double s, double i = 0.0);  // rejects NaN/Inf parts

  friend auto operator<=>(const DualScalar&, const DualScalar&) = default;

  DualScalar operator-() const { return DualScalar(-standard, -infinitesimal); }

  friend DualScalar operator+(const DualScalar& a, const DualScalar& b) {
    return DualScalar(a.standard + b.standard, a.infinitesimal + b.infinitesimal);
  }
  friend DualScalar operator-(const DualScalar& a, const DualScalar& b) {
    return DualScalar(a.standard - b.standard, a.infinitesimal - b.infinitesimal);
  }
  // eps^2 = 0: (a_s + a_i e)(b_s + b_i e) = a_s b_s + (a_s b_i + a_i b_s) e
  friend DualScalar operator*(const DualScalar& a, const DualScalar& b) {
    return DualScalar(a.standard * b.standard,
                      a.standard * b.infinitesimal + a.infinitesimal * b.standard);
  }
  friend DualScalar operator*(double a, const DualScalar& b) {
    return DualScalar(a * b.standard, a * b.infinitesimal);
  }
  friend DualScalar operator*(const DualScalar& a, double b) { return b * a; }

  /// Throws std::domain_error when the divisor is not appreciable:
  /// dual numbers with zero standard part have no inverse.
  friend DualScalar operator/(const DualScalar& a, const DualScalar& b);
};

/// True iff the standard part is nonzero under the absolute tolerance policy.
bool is_appreciable(const DualScalar& p);

/// Strict total order, the named form of operator<.
bool dual_less_than(const DualScalar& p, const DualScalar& q);

/// True iff 0 < p under the total order.
bool dual_positive(const DualScalar& p);

/// Renders "a+be" / "a-be" with decimal literals (e is the UTF-8 epsilon).
std::string to_string(const DualScalar& p, int precision = 17);

/// Parses the textual form "a+be" / "a-be"; whitespace around the sign is
/// accepted, as is a bare standard part "a". Throws std::invalid_argument.
DualScalar parse_dual_scalar(std::string_view text);

/// A dual complex number; eps commutes with complex scalars.
struct DualComplexScalar {
  std::complex<double> standard{0.0, 0.0};
  std::complex<double> infinitesimal{0.0, 0.0};

  DualComplexScalar() = default;
  DualComplexScalar(std::complex<double> s, std::complex<double> i = {});

  friend bool operator==(const DualComplexScalar&, const DualComplexScalar&) = default;

  friend DualComplexScalar operator+(const DualComplexScalar& a, const DualComplexScalar& b) {
    return DualComplexScalar(a.standard + b.standard, a.infinitesimal + b.infinitesimal);
  }
  friend DualComplexScalar operator-(const DualComplexScalar& a, const DualComplexScalar& b) {
    return DualComplexScalar(a.standard - b.standard, a.infinitesimal - b.infinitesimal);
  }
  friend DualComplexScalar operator*(const DualComplexScalar& a, const DualComplexScalar& b) {
    return DualComplexScalar(a.standard * b.standard,
                             a.standard * b.infinitesimal + a.infinitesimal * b.standard);
  }
};

DualComplexScalar conj(const DualComplexScalar& p);

}  // namespace dualsvd
