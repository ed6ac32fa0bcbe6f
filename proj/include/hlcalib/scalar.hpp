#pragma once

// Scalar backends shared by the whole algebra: exact rationals (GMP) and
// IEEE double. Algorithms are templated on the scalar and talk to it only
// through ScalarTraits.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace hlcalib {

using Rational = mpq_class;

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static double from_int(long v) { return static_cast<double>(v); }
  static double from_ratio(long num, long den) {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  static double to_double(double v) { return v; }
  static bool is_zero(double v) { return v == 0.0; }
  static double abs(double v) { return std::abs(v); }
  static std::string to_string(double v);
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational from_int(long v) { return Rational(v); }
  static Rational from_ratio(long num, long den) {
    Rational r(num, den);
    r.canonicalize();
    return r;
  }
  static double to_double(const Rational& v) { return v.get_d(); }
  static bool is_zero(const Rational& v) { return sgn(v) == 0; }
  static Rational abs(const Rational& v) { return ::abs(v); }
  static std::string to_string(const Rational& v) { return v.get_str(); }
};

inline std::string ScalarTraits<double>::to_string(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class S>
using Vec = std::vector<S>;

template <class S>
Vec<S> zeros(int n) {
  return Vec<S>(static_cast<std::size_t>(n), ScalarTraits<S>::from_int(0));
}

template <class S>
Vec<S> basis_vector(int n, int index) {
  Vec<S> v = zeros<S>(n);
  v.at(static_cast<std::size_t>(index - 1)) = ScalarTraits<S>::from_int(1);
  return v;
}

template <class S>
S dot(const Vec<S>& a, const Vec<S>& b) {
  S acc = ScalarTraits<S>::from_int(0);
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

template <class S>
Vec<S> to_scalar_vec(const std::vector<long>& ints) {
  Vec<S> out;
  out.reserve(ints.size());
  for (long v : ints) out.push_back(ScalarTraits<S>::from_int(v));
  return out;
}

inline std::vector<double> to_double_vec(const Vec<Rational>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(x.get_d());
  return out;
}

}  // namespace hlcalib
