#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace vouch {

inline constexpr std::uint64_t kUnitsPerCoin = 100'000'000;

/// Non-negative count of base units (1 coin = 10^8 units). Arithmetic is
/// exact; overflow and underflow throw Error(value_overflow).
class Amount {
 public:
  constexpr Amount() = default;
  constexpr explicit Amount(std::uint64_t units) : units_(units) {}

  static constexpr Amount coins(std::uint64_t whole) { return Amount(whole * kUnitsPerCoin); }

  constexpr std::uint64_t units() const noexcept { return units_; }
  constexpr bool is_zero() const noexcept { return units_ == 0; }

  Amount& operator+=(Amount other);
  Amount& operator-=(Amount other);
  friend Amount operator+(Amount a, Amount b) { return a += b; }
  friend Amount operator-(Amount a, Amount b) { return a -= b; }

  friend constexpr auto operator<=>(Amount, Amount) = default;

 private:
  std::uint64_t units_ = 0;
};

/// Parses a decimal coin amount ("0.1", "50", "0.00300000") exactly.
/// Rejects signs, exponents, and more than 8 fractional digits.
Amount parse_coins(std::string_view text);

/// Fixed 8-decimal rendering, e.g. 300000 units -> "0.00300000".
std::string format_coins(Amount amount);

/// Rational in (0, 1] used for the vote-fee percentage.
struct Rate {
  std::uint64_t numerator = 3;
  std::uint64_t denominator = 100;

  /// floor(rate * amount) in base units.
  Amount apply(Amount amount) const;
  bool in_unit_interval() const noexcept {
    return denominator != 0 && numerator != 0 && numerator <= denominator;
  }
  std::string text() const;

  static Rate percent(std::uint64_t p) { return Rate{p, 100}; }
  /// "0.03" or "3/100"; throws Error(parse_error).
  static Rate parse(std::string_view text);

  friend bool operator==(const Rate&, const Rate&) = default;
};

}  // namespace vouch
