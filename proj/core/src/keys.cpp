#include "vouch/keys.hpp"

#include <sodium.h>

#include "vouch/error.hpp"

namespace vouch {

namespace {

void ensure_sodium() {
  static const bool ready = sodium_init() >= 0;
  if (!ready) throw Error(Errc::invalid_config, "libsodium failed to initialise");
}

}  // namespace

KeyPair KeyPair::from_seed(const Seed& seed) {
  ensure_sodium();
  KeyPair kp;
  kp.seed_ = seed;
  crypto_sign_seed_keypair(kp.public_.data(), kp.secret_.data(), seed.data());
  kp.id_ = key_id(kp.public_);
  return kp;
}

KeyPair KeyPair::generate() {
  ensure_sodium();
  Seed seed;
  randombytes_buf(seed.data(), seed.size());
  return from_seed(seed);
}

Signature KeyPair::sign(ByteView message) const {
  Signature sig;
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), secret_.data());
  return sig;
}

bool verify(const Signature& sig, ByteView message, const PublicKey& key) {
  ensure_sodium();
  return crypto_sign_verify_detached(sig.data(), message.data(), message.size(), key.data()) == 0;
}

Seed seed_from_label(std::string_view label) { return sha256(as_bytes(label)); }

}  // namespace vouch
