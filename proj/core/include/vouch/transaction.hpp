#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "vouch/amount.hpp"
#include "vouch/codec.hpp"
#include "vouch/keys.hpp"

namespace vouch {

struct TxId {
  Hash256 bytes{};

  std::string hex() const { return to_hex(bytes); }
  static TxId from_hex(std::string_view hex) { return TxId{array_from_hex<32>(hex)}; }

  friend auto operator<=>(const TxId&, const TxId&) = default;
};

struct OutPoint {
  TxId txid;
  std::uint32_t index = 0;

  friend auto operator<=>(const OutPoint&, const OutPoint&) = default;
};

struct PayToKeyHash {
  KeyId key{};
  friend auto operator<=>(const PayToKeyHash&, const PayToKeyHash&) = default;
};

/// Spendable only with valid signatures from both keys.
struct PayToMultisig2of2 {
  KeyId first{};
  KeyId second{};
  friend auto operator<=>(const PayToMultisig2of2&, const PayToMultisig2of2&) = default;
};

/// Output tagged with a service address. Nobody holds a key hashing to the
/// payload, so the output is never spendable.
struct Marker {
  Hash160 service{};
  friend auto operator<=>(const Marker&, const Marker&) = default;
};

using OutputLock = std::variant<PayToKeyHash, PayToMultisig2of2, Marker>;

struct TxOut {
  Amount amount;
  OutputLock lock;

  friend bool operator==(const TxOut&, const TxOut&) = default;
};

struct InputSignature {
  PublicKey key{};
  Signature sig{};

  friend bool operator==(const InputSignature&, const InputSignature&) = default;
};

struct TxIn {
  OutPoint prevout;
  std::vector<InputSignature> signatures;

  friend bool operator==(const TxIn&, const TxIn&) = default;
};

struct Transaction {
  std::vector<TxIn> inputs;
  std::vector<TxOut> outputs;
  bool is_coinbase = false;
  /// Height a coinbase belongs to; keeps otherwise identical coinbases distinct.
  std::uint64_t coinbase_height = 0;

  Amount output_total() const;

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

/// Signature-free body:
///   inputs  : u64 count, then per input  [len32 | txid] u64 index
///   outputs : u64 count, then per output u64 amount, u64 lock tag, [len32 | key-hash]...
///   u64 is_coinbase, u64 coinbase_height
/// Integers are 8-byte little-endian; byte fields carry a 4-byte little-endian length.
Bytes canonical_serialize(const Transaction& tx);

/// Body followed by every input's signature set; committed to by block digests.
Bytes serialize_with_signatures(const Transaction& tx);

/// sha256d of the canonical body, so adding signatures leaves the id unchanged.
TxId txid(const Transaction& tx);

/// Message signed for input `index`: sha256d(body | u64 index).
Hash256 signature_hash(const Transaction& tx, std::size_t index);

}  // namespace vouch
