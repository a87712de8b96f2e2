#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace llfun {

/// Carrier for the naturals manipulated by translated programs.
///
/// Register values never exceed 64 bits; intermediate address arithmetic and
/// retval need headroom beyond that, so naturals are held in 128 bits and any
/// operation that would leave that range faults instead of wrapping.
using Nat = unsigned __int128;

inline constexpr Nat nat_max = ~Nat{0};

/// 2^k for k < 128.
constexpr Nat pow2(unsigned k) { return Nat{1} << k; }

/// Mask of the low `width` bits; width in 1..128.
constexpr Nat low_mask(unsigned width) {
  return width >= 128 ? nat_max : pow2(width) - 1;
}

std::string to_string(Nat value);
std::string to_hex(Nat value);

/// Decimal, `0x` hex or `#x` hex. Returns nullopt on syntax error or overflow.
std::optional<Nat> parse_nat(std::string_view text);

} // namespace llfun
