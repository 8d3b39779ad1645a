#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

// Under C++20 rewritten comparisons, boost 1.74 resolves rational == integer
// back into its own mixed template and recurses forever. Exact overloads win.
namespace boost {
#define COARSE_RATIONAL_EQ(T)                                                              \
  inline bool operator==(const rational<std::int64_t>& a, T b) {                           \
    return a.denominator() == 1 && a.numerator() == static_cast<std::int64_t>(b);          \
  }                                                                                        \
  inline bool operator==(T b, const rational<std::int64_t>& a) { return a == b; }          \
  inline bool operator!=(const rational<std::int64_t>& a, T b) { return !(a == b); }       \
  inline bool operator!=(T b, const rational<std::int64_t>& a) { return !(a == b); }
COARSE_RATIONAL_EQ(int)
COARSE_RATIONAL_EQ(long)
COARSE_RATIONAL_EQ(long long)
#undef COARSE_RATIONAL_EQ
}  // namespace boost

namespace coarse {

using Vertex = std::int32_t;
using Dist = std::int32_t;
using Rational = boost::rational<std::int64_t>;

inline constexpr Dist kUnreachable = -1;

// Error taxonomy. The CLI maps InputError/PreconditionError to exit code 3 and
// InternalError to exit code 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A graph or path system violates a structural requirement (e.g. not median).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Operation not supported by the path-system kind it was invoked on.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// A theorem-backed postcondition failed. Always a bug.
class InternalError : public Error {
 public:
  using Error::Error;
};

// Exhaustive enumeration could not be completed within the configured cap.
class EnumerationCapError : public Error {
 public:
  using Error::Error;
};

// A constructive search ran out of candidates.
class SearchExhaustedError : public Error {
 public:
  using Error::Error;
};

inline std::int64_t floor_of(const Rational& r) {
  auto q = r.numerator() / r.denominator();
  if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
  return q;
}

inline std::int64_t ceil_of(const Rational& r) {
  return -floor_of(-r);
}

// Accepts "3", "-2", "1/4" and decimal forms such as "0.25".
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);
double to_double(const Rational& r);

// Closed ball B(center, radius). Membership is "d(v, center) <= radius";
// a negative radius denotes the empty ball.
struct Ball {
  Vertex center = 0;
  Rational radius = Rational(-1);

  // Largest integer distance inside the ball, or -1 when the ball is empty.
  Dist max_dist() const {
    if (radius < 0) return -1;
    return static_cast<Dist>(floor_of(radius));
  }
  bool contains_distance(Dist d) const { return d >= 0 && d <= max_dist(); }
  bool empty() const { return radius < 0; }

  static Ball none() { return Ball{0, Rational(-1)}; }
};

}  // namespace coarse
