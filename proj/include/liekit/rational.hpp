#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace liekit {

/// Exact rational scalar. Always stored in lowest terms with positive denominator.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rat rat(long long n) { return Rat(n); }

inline Rat rat(long long num, long long den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  return Rat(BigInt(num)) / Rat(BigInt(den));
}

inline BigInt rat_num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline BigInt rat_den(const Rat& r) { return boost::multiprecision::denominator(r); }

/// Serialize as "p" or "p/q"; the form used in instance files and reports.
inline std::string rat_str(const Rat& r) {
  std::ostringstream os;
  os << rat_num(r);
  if (rat_den(r) != 1) os << '/' << rat_den(r);
  return os.str();
}

/// Parse "p", "-p", "p/q". Whitespace is not accepted.
inline std::optional<Rat> rat_parse(const std::string& s) {
  if (s.empty()) return std::nullopt;
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(BigInt(s));
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) return std::nullopt;
    return Rat(num) / Rat(den);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

/// n! as an exact integer.
inline BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace liekit
