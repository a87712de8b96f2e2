#include "llfun/nat.hpp"

#include <algorithm>

namespace llfun {

std::string to_string(Nat value) {
  if (value == 0)
    return "0";
  std::string out;
  while (value != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string to_hex(Nat value) {
  static constexpr char digits[] = "0123456789abcdef";
  if (value == 0)
    return "0x0";
  std::string out;
  while (value != 0) {
    out.push_back(digits[static_cast<int>(value & 0xf)]);
    value >>= 4;
  }
  out += "x0";
  std::reverse(out.begin(), out.end());
  return out;
}

std::optional<Nat> parse_nat(std::string_view text) {
  unsigned base = 10;
  if (text.starts_with("0x") || text.starts_with("0X") || text.starts_with("#x")) {
    base = 16;
    text.remove_prefix(2);
  }
  if (text.empty())
    return std::nullopt;
  Nat value = 0;
  for (char c : text) {
    unsigned digit;
    if (c >= '0' && c <= '9')
      digit = static_cast<unsigned>(c - '0');
    else if (base == 16 && c >= 'a' && c <= 'f')
      digit = static_cast<unsigned>(c - 'a' + 10);
    else if (base == 16 && c >= 'A' && c <= 'F')
      digit = static_cast<unsigned>(c - 'A' + 10);
    else
      return std::nullopt;
    if (value > (nat_max - digit) / base)
      return std::nullopt;
    value = value * base + digit;
  }
  return value;
}

} // namespace llfun
