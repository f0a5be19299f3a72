#include "vouch/amount.hpp"

#include <charconv>
#include <limits>

#include "vouch/error.hpp"

namespace vouch {

Amount& Amount::operator+=(Amount other) {
  if (units_ > std::numeric_limits<std::uint64_t>::max() - other.units_) {
    throw Error(Errc::value_overflow, "amount addition overflows");
  }
  units_ += other.units_;
  return *this;
}

Amount& Amount::operator-=(Amount other) {
  if (other.units_ > units_) throw Error(Errc::value_overflow, "amount subtraction underflows");
  units_ -= other.units_;
  return *this;
}

namespace {

// Parses digits of `text` as "<int>[.<frac>]" into units scaled by 10^frac_limit.
bool parse_fixed(std::string_view text, unsigned frac_limit, std::uint64_t scale, std::uint64_t& out,
                 unsigned& frac_digits) {
  if (text.empty()) return false;
  const auto dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() && frac.empty()) return false;
  if (dot != std::string_view::npos && frac.empty()) return false;
  if (frac.size() > frac_limit) return false;
  for (char c : whole) if (c < '0' || c > '9') return false;
  for (char c : frac) if (c < '0' || c > '9') return false;

  unsigned __int128 value = 0;
  for (char c : whole) {
    value = value * 10 + static_cast<unsigned>(c - '0');
    if (value > std::numeric_limits<std::uint64_t>::max()) return false;
  }
  value *= scale;
  std::uint64_t f = 0;
  for (char c : frac) f = f * 10 + static_cast<unsigned>(c - '0');
  for (std::size_t i = frac.size(); i < frac_limit; ++i) f *= 10;
  value += f;
  if (value > std::numeric_limits<std::uint64_t>::max()) return false;
  out = static_cast<std::uint64_t>(value);
  frac_digits = static_cast<unsigned>(frac.size());
  return true;
}

}  // namespace

Amount parse_coins(std::string_view text) {
  std::uint64_t units = 0;
  unsigned digits = 0;
  if (!parse_fixed(text, 8, kUnitsPerCoin, units, digits)) {
    throw Error(Errc::parse_error, "invalid coin amount '" + std::string(text) + "' (at most 8 decimals)");
  }
  return Amount(units);
}

std::string format_coins(Amount amount) {
  std::string frac = std::to_string(amount.units() % kUnitsPerCoin);
  frac.insert(0, 8 - frac.size(), '0');
  return std::to_string(amount.units() / kUnitsPerCoin) + "." + frac;
}

Amount Rate::apply(Amount amount) const {
  const unsigned __int128 scaled =
      static_cast<unsigned __int128>(amount.units()) * numerator / denominator;
  return Amount(static_cast<std::uint64_t>(scaled));
}

std::string Rate::text() const { return std::to_string(numerator) + "/" + std::to_string(denominator); }

Rate Rate::parse(std::string_view text) {
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    Rate r{0, 0};
    const auto num = text.substr(0, slash);
    const auto den = text.substr(slash + 1);
    const auto a = std::from_chars(num.data(), num.data() + num.size(), r.numerator);
    const auto b = std::from_chars(den.data(), den.data() + den.size(), r.denominator);
    if (num.empty() || den.empty() || a.ec != std::errc{} || a.ptr != num.data() + num.size() ||
        b.ec != std::errc{} || b.ptr != den.data() + den.size()) {
      throw Error(Errc::parse_error, "invalid rate '" + std::string(text) + "'");
    }
    return r;
  }
  std::uint64_t scaled = 0;
  unsigned digits = 0;
  constexpr unsigned kMaxDigits = 12;
  constexpr std::uint64_t kScale = 1'000'000'000'000ULL;
  if (!parse_fixed(text, kMaxDigits, kScale, scaled, digits)) {
    throw Error(Errc::parse_error, "invalid rate '" + std::string(text) + "'");
  }
  std::uint64_t den = kScale;
  while (den > 1 && scaled % 10 == 0) {
    scaled /= 10;
    den /= 10;
  }
  return Rate{scaled, den};
}

}  // namespace vouch
