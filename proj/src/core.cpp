#include "coarse/core.hpp"

#include <charconv>
#include <numeric>

namespace coarse {

namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  std::int64_t value = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw InputError("not a rational number: '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    auto den = parse_int(text.substr(slash + 1), text);
    if (den == 0) throw InputError("zero denominator: '" + std::string(text) + "'");
    return Rational(parse_int(text.substr(0, slash), text), den);
  }
  auto dot = text.find('.');
  if (dot == std::string_view::npos) return Rational(parse_int(text, text));
  std::string_view frac = text.substr(dot + 1);
  if (frac.size() > 12) throw InputError("too many decimals: '" + std::string(text) + "'");
  std::string_view whole = text.substr(0, dot);
  bool negative = !whole.empty() && whole.front() == '-';
  std::int64_t scale = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
  std::int64_t int_part = whole.empty() || whole == "-" ? 0 : parse_int(whole, text);
  std::int64_t frac_part = frac.empty() ? 0 : parse_int(frac, text);
  Rational r(std::abs(int_part) * scale + frac_part, scale);
  return negative ? -r : r;
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace coarse
