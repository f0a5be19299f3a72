#pragma once

// Hashing, Base58Check addresses and service-marker derivation.

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vouch {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using Hash160 = std::array<std::uint8_t, 20>;
using Hash256 = std::array<std::uint8_t, 32>;

inline ByteView as_bytes(std::string_view s) noexcept {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

Hash256 sha256(ByteView data);
/// SHA-256 applied twice.
Hash256 sha256d(ByteView data);
Hash160 ripemd160(ByteView data);
/// RIPEMD-160 of SHA-256 of `data`: the key-hash used as address payload.
Hash160 hash160(ByteView data);

std::string to_hex(ByteView data);
/// Throws Error(parse_error) on odd length or a non-hex digit.
Bytes from_hex(std::string_view hex);

template <std::size_t N>
std::array<std::uint8_t, N> array_from_hex(std::string_view hex);

template <std::size_t N>
std::string to_hex(const std::array<std::uint8_t, N>& a) {
  return to_hex(ByteView(a));
}

/// Plain Base58 over the standard alphabet; leading zero bytes map to '1'.
std::string base58_encode(ByteView data);
/// Throws Error(malformed) on an empty string or a character outside the alphabet.
Bytes base58_decode(std::string_view text);

inline constexpr std::uint8_t kKeyHashVersion = 0x00;
inline constexpr std::uint8_t kScriptHashVersion = 0x05;
/// Service markers share the key-hash version so they are indistinguishable
/// from ordinary pay-to-key-hash addresses.
inline constexpr std::uint8_t kServiceMarkerVersion = kKeyHashVersion;

struct Address {
  std::uint8_t version = kKeyHashVersion;
  Hash160 payload{};

  std::string text() const;

  friend auto operator<=>(const Address&, const Address&) = default;
};

/// Base58(version | payload | first 4 bytes of sha256d(version | payload)).
/// Throws Error(invalid_payload) unless payload is exactly 20 bytes.
std::string base58check_encode(std::uint8_t version, ByteView payload);

/// Inverse of base58check_encode. Throws Error(malformed) for bad characters or
/// a wrong decoded length, Error(checksum) when the check code does not verify.
Address base58check_decode(std::string_view text);

/// hash160 of the UTF-8 url under the service-marker version byte.
/// Throws Error(invalid_service) for an empty url.
Address derive_service_address(std::string_view url);

enum class AddressClass { key_hash, script_hash, invalid };

struct AddressCheck {
  AddressClass kind = AddressClass::invalid;
  std::string reason;  // empty unless invalid

  bool valid() const noexcept { return kind != AddressClass::invalid; }
};

AddressCheck validate_address(std::string_view text);

}  // namespace vouch
