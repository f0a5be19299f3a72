#include "vouch/codec.hpp"

#include <openssl/ripemd.h>
#include <openssl/sha.h>

#include <algorithm>

#include "vouch/error.hpp"

namespace vouch {

namespace {

constexpr std::string_view kAlphabet =
    "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

constexpr std::array<std::int8_t, 128> make_reverse_alphabet() {
  std::array<std::int8_t, 128> table{};
  for (auto& v : table) v = -1;
  for (std::size_t i = 0; i < kAlphabet.size(); ++i) {
    table[static_cast<unsigned char>(kAlphabet[i])] = static_cast<std::int8_t>(i);
  }
  return table;
}

constexpr auto kReverse = make_reverse_alphabet();

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Hash256 sha256(ByteView data) {
  Hash256 out;
  SHA256(data.data(), data.size(), out.data());
  return out;
}

Hash256 sha256d(ByteView data) {
  const Hash256 first = sha256(data);
  return sha256(first);
}

Hash160 ripemd160(ByteView data) {
  Hash160 out;
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wdeprecated-declarations"
  // The EVP route only exposes RIPEMD-160 through the legacy provider on
  // OpenSSL 3.0.x; the one-shot function is always present.
  RIPEMD160(data.data(), data.size(), out.data());
#pragma GCC diagnostic pop
  return out;
}

Hash160 hash160(ByteView data) {
  const Hash256 inner = sha256(data);
  return ripemd160(inner);
}

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw Error(Errc::parse_error, "odd-length hex string");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = hex_value(hex[i]);
    const int lo = hex_value(hex[i + 1]);
    if (hi < 0 || lo < 0) throw Error(Errc::parse_error, "non-hex digit in '" + std::string(hex) + "'");
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

template <std::size_t N>
std::array<std::uint8_t, N> array_from_hex(std::string_view hex) {
  const Bytes raw = from_hex(hex);
  if (raw.size() != N) {
    throw Error(Errc::parse_error,
                "expected " + std::to_string(N) + " bytes, got " + std::to_string(raw.size()));
  }
  std::array<std::uint8_t, N> out;
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

template std::array<std::uint8_t, 20> array_from_hex<20>(std::string_view);
template std::array<std::uint8_t, 32> array_from_hex<32>(std::string_view);
template std::array<std::uint8_t, 64> array_from_hex<64>(std::string_view);

std::string base58_encode(ByteView data) {
  const auto zeros = static_cast<std::size_t>(
      std::find_if(data.begin(), data.end(), [](std::uint8_t b) { return b != 0; }) - data.begin());

  // Big-endian base-58 digits of the number, little end first. log(256)/log(58) < 1.38.
  std::vector<std::uint8_t> digits((data.size() - zeros) * 138 / 100 + 1, 0);
  std::size_t used = 0;
  for (std::size_t i = zeros; i < data.size(); ++i) {
    unsigned carry = data[i];
    std::size_t j = 0;
    for (; j < used || carry != 0; ++j) {
      carry += 256u * digits[j];
      digits[j] = static_cast<std::uint8_t>(carry % 58);
      carry /= 58;
    }
    used = j;
  }

  std::string out(zeros, '1');
  out.reserve(zeros + used);
  for (std::size_t j = used; j-- > 0;) out.push_back(kAlphabet[digits[j]]);
  return out;
}

Bytes base58_decode(std::string_view text) {
  if (text.empty()) throw Error(Errc::malformed, "empty string");
  const auto zeros = static_cast<std::size_t>(
      std::find_if(text.begin(), text.end(), [](char c) { return c != '1'; }) - text.begin());

  std::vector<std::uint8_t> bytes(text.size() * 733 / 1000 + 1, 0);  // log(58)/log(256)
  std::size_t used = 0;
  for (std::size_t i = zeros; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    const int value = c < 128 ? kReverse[c] : -1;
    if (value < 0) {
      throw Error(Errc::malformed, "character '" + std::string(1, text[i]) + "' is not in the Base58 alphabet");
    }
    unsigned carry = static_cast<unsigned>(value);
    std::size_t j = 0;
    for (; j < used || carry != 0; ++j) {
      carry += 58u * bytes[j];
      bytes[j] = static_cast<std::uint8_t>(carry & 0xff);
      carry >>= 8;
    }
    used = j;
  }

  Bytes out(zeros, 0);
  out.reserve(zeros + used);
  for (std::size_t j = used; j-- > 0;) out.push_back(bytes[j]);
  return out;
}

std::string Address::text() const { return base58check_encode(version, payload); }

std::string base58check_encode(std::uint8_t version, ByteView payload) {
  if (payload.size() != 20) {
    throw Error(Errc::invalid_payload, "payload must be 20 bytes, got " + std::to_string(payload.size()));
  }
  Bytes buf;
  buf.reserve(25);
  buf.push_back(version);
  buf.insert(buf.end(), payload.begin(), payload.end());
  const Hash256 check = sha256d(buf);
  buf.insert(buf.end(), check.begin(), check.begin() + 4);
  return base58_encode(buf);
}

Address base58check_decode(std::string_view text) {
  const Bytes raw = base58_decode(text);
  if (raw.size() != 25) {
    throw Error(Errc::malformed, "decoded length " + std::to_string(raw.size()) + " (expected 25)");
  }
  const Hash256 check = sha256d(ByteView(raw).first(21));
  if (!std::equal(check.begin(), check.begin() + 4, raw.begin() + 21)) {
    throw Error(Errc::checksum, "check code mismatch for '" + std::string(text) + "'");
  }
  Address addr;
  addr.version = raw[0];
  std::copy(raw.begin() + 1, raw.begin() + 21, addr.payload.begin());
  return addr;
}

Address derive_service_address(std::string_view url) {
  if (url.empty()) throw Error(Errc::invalid_service, "service url is empty");
  return Address{kServiceMarkerVersion, hash160(as_bytes(url))};
}

AddressCheck validate_address(std::string_view text) {
  try {
    const Address addr = base58check_decode(text);
    switch (addr.version) {
      case kKeyHashVersion: return {AddressClass::key_hash, {}};
      case kScriptHashVersion: return {AddressClass::script_hash, {}};
      default: return {AddressClass::invalid, "unknown version byte " + std::to_string(addr.version)};
    }
  } catch (const Error& e) {
    return {AddressClass::invalid, e.what()};
  }
}

}  // namespace vouch
