#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string>

#include "revmc/cli/chainfile.hpp"

namespace revmc::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

long long parse_integer(std::string_view s, std::string_view whole) {
  long long v = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("bad ratio '" + std::string(whole) + "': numerator and denominator must be integers");
  return v;
}

}  // namespace

double parse_number(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.empty()) throw ParseError("empty number");
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const long long num = parse_integer(trim(s.substr(0, slash)), s);
    const long long den = parse_integer(trim(s.substr(slash + 1)), s);
    if (den == 0) throw ParseError("bad ratio '" + std::string(s) + "': zero denominator");
    constexpr long long kExact = 1LL << 53;
    if (std::llabs(num) > kExact || std::llabs(den) > kExact)
      throw ParseError("bad ratio '" + std::string(s) + "': terms exceed 2^53");
    return static_cast<double>(num) / static_cast<double>(den);
  }
  const std::string buf(s);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || errno == ERANGE || !std::isfinite(v))
    throw ParseError("bad number '" + buf + "'");
  return v;
}

}  // namespace revmc::cli
