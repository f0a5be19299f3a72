#pragma once

#include <array>
#include <cstdint>

#include "vouch/codec.hpp"

namespace vouch {

using Seed = std::array<std::uint8_t, 32>;
using PublicKey = std::array<std::uint8_t, 32>;
using Signature = std::array<std::uint8_t, 64>;
/// hash160 of a public key; the payload of its key-hash address.
using KeyId = Hash160;

/// Deterministic Ed25519 key pair derived from a 32-byte seed.
class KeyPair {
 public:
  static KeyPair from_seed(const Seed& seed);
  static KeyPair generate();

  const Seed& seed() const noexcept { return seed_; }
  const PublicKey& public_key() const noexcept { return public_; }
  KeyId id() const noexcept { return id_; }
  Address address() const { return Address{kKeyHashVersion, id_}; }

  Signature sign(ByteView message) const;

 private:
  KeyPair() = default;

  Seed seed_{};
  PublicKey public_{};
  std::array<std::uint8_t, 64> secret_{};
  KeyId id_{};
};

bool verify(const Signature& sig, ByteView message, const PublicKey& key);

inline KeyId key_id(const PublicKey& key) { return hash160(key); }

/// Seed derived from a label; test and simulation use only.
Seed seed_from_label(std::string_view label);

}  // namespace vouch
