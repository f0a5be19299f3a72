#pragma once

// UTXO chain model. Blocks are produced by explicit mine() calls with a
// caller-chosen miner; there is no proof-of-work race, fork choice or reorg.

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "vouch/amount.hpp"
#include "vouch/error.hpp"
#include "vouch/keys.hpp"
#include "vouch/transaction.hpp"

namespace vouch {

struct Allocation {
  KeyId key{};
  Amount amount;
};

struct ChainConfig {
  Amount subsidy = Amount::coins(50);
  std::vector<Allocation> allocations;
};

struct Block {
  std::uint64_t height = 0;
  Hash256 prev{};
  Transaction coinbase;
  std::vector<Transaction> transactions;

  /// sha256d(u64 height | prev | coinbase with signatures | transactions with signatures).
  Hash256 digest() const;

  friend bool operator==(const Block&, const Block&) = default;
};

/// Outcome of validating one transaction; `fee` is meaningful only when ok().
struct Validation {
  std::optional<Errc> error;
  std::string detail;
  Amount fee;

  bool ok() const noexcept { return !error.has_value(); }
};

/// Thrown by Chain::mine/append when a transaction in the batch does not
/// validate in order. code() is the underlying validation error.
class BlockRejected : public Error {
 public:
  BlockRejected(Errc code, TxId offending, const std::string& detail)
      : Error(code, "transaction " + offending.hex() + " rejected: " + detail), txid_(offending) {}
  const TxId& txid() const noexcept { return txid_; }

 private:
  TxId txid_;
};

struct TxLocation {
  std::uint64_t height = 0;
  /// 0 is the coinbase; i + 1 is transactions[i].
  std::size_t position = 0;
};

class Chain {
 public:
  static Chain create(const ChainConfig& config);
  /// Rebuilds state from a stored genesis block (loader path).
  static Chain from_genesis(const Block& genesis, Amount subsidy);

  const ChainConfig& config() const noexcept { return config_; }
  Amount subsidy() const noexcept { return config_.subsidy; }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  std::uint64_t height() const noexcept { return blocks_.size() - 1; }
  const Block& tip() const noexcept { return blocks_.back(); }

  /// Pointers stay valid until the next append.
  const TxOut* unspent(const OutPoint& op) const;
  const Transaction* find(const TxId& id) const;
  std::optional<TxLocation> locate(const TxId& id) const;
  /// Spending transaction, if the outpoint was ever consumed.
  std::optional<TxId> spender(const OutPoint& op) const;
  /// Output as created, whether or not it has been spent since.
  const TxOut* output(const OutPoint& op) const;

  const std::map<OutPoint, TxOut>& utxos() const noexcept { return utxos_; }
  /// Unspent pay-to-key-hash outpoints owned by `key`, in outpoint order.
  std::vector<OutPoint> unspent_for(const KeyId& key) const;

  /// Sum of every unspent output.
  Amount supply() const noexcept { return supply_; }
  /// Fees collected by the coinbase of block `height` (0 for genesis).
  Amount block_fees(std::uint64_t height) const { return fees_.at(height); }
  /// Fee of a confirmed non-coinbase transaction.
  std::optional<Amount> fee_of(const TxId& id) const;
  /// Txids of block `height`, indexed like TxLocation::position.
  const std::vector<TxId>& block_txids(std::uint64_t height) const { return txids_.at(height); }

  Validation validate(const Transaction& tx) const;

  /// Validates `pending` in order (later transactions may spend earlier ones),
  /// then appends a block whose coinbase pays `miner` subsidy + fees.
  const Block& mine(std::span<const Transaction> pending, const KeyId& miner);

  /// Fully validates and appends an externally built block.
  void append(const Block& block);

 private:
  class View;
  friend class View;

  Chain() = default;
  void apply(const Transaction& tx, const TxId& id, std::uint64_t height, std::size_t position, Amount fee);
  void apply_block(const Block& b, const std::vector<Amount>& tx_fees);

  ChainConfig config_;
  std::vector<Block> blocks_;
  std::vector<Amount> fees_;
  std::vector<std::vector<TxId>> txids_;
  std::map<OutPoint, TxOut> utxos_;
  std::map<OutPoint, TxId> spent_;
  std::map<TxId, TxLocation> locations_;
  std::map<TxId, Amount> tx_fees_;
  std::map<KeyId, std::set<OutPoint>> by_key_;
  Amount supply_;
};

Chain new_chain(const ChainConfig& config);
Validation validate_transaction(const Transaction& tx, const Chain& chain);
const Block& mine_block(Chain& chain, std::span<const Transaction> pending, const KeyId& miner);

/// Adds (or replaces) `key`'s signature on input `index`. Throws
/// Error(wrong_key) unless the key hash matches the spent output's lock.
void sign_input(Transaction& tx, std::size_t index, const KeyPair& key, const TxOut& spent);
void sign_input(Transaction& tx, std::size_t index, const KeyPair& key, const Chain& chain);

/// Signature check only, against the outputs each input spends.
Validation verify_signatures(const Transaction& tx, const Chain& chain);

/// Signature check for a single input against the output it spends.
Validation verify_input(const Transaction& tx, std::size_t index, const TxOut& spent);

}  // namespace vouch
