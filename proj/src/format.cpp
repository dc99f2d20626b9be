// Decimal conversion. Doubleword values go through a 50-digit binary float
// so that hi + lo is summed without loss before rounding to 32 digits.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cctype>
#include <charconv>
#include <stdexcept>
#include <string>

#include "ahmedquad/scalar.hpp"

namespace ahmedquad {

namespace {

using Wide = boost::multiprecision::cpp_bin_float_50;

constexpr int kDoublewordDigits = 32;

bool looks_numeric(std::string_view text) {
  if (text.empty()) return false;
  std::size_t i = 0;
  if (text[i] == '+' || text[i] == '-') ++i;
  bool digits = false;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    ++i;
    digits = true;
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      ++i;
      digits = true;
    }
  }
  if (!digits) return false;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) ++i;
    bool exp_digits = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      ++i;
      exp_digits = true;
    }
    if (!exp_digits) return false;
  }
  return i == text.size();
}

}  // namespace

std::string to_string(const Real& x) {
  if (x.tier() == Tier::native64) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x.hi());
    return std::string(buf, res.ptr);
  }
  if (x.is_zero()) return "0";
  Wide wide(x.hi());
  wide += Wide(x.lo());
  return wide.str(kDoublewordDigits - 1, std::ios_base::scientific);
}

Real parse_real(std::string_view text, Tier tier) {
  if (!looks_numeric(text)) {
    throw std::invalid_argument("not a decimal number: '" + std::string(text) + "'");
  }
  if (tier == Tier::native64) {
    if (text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
      throw std::invalid_argument("not a representable number: '" + std::string(text) + "'");
    }
    return Real(v, tier);
  }
  const Wide wide{std::string(text)};
  const double hi = static_cast<double>(wide);
  const double lo = static_cast<double>(wide - Wide(hi));
  return Real::from_parts(hi, lo, tier);
}

}  // namespace ahmedquad
