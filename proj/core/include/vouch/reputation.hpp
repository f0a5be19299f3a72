#pragma once

// Chain-traversing reputation indexer.
//
// A payment is any transaction with the fixed [price, 0 -> marker, change]
// layout. A voucher counts when it spends a 2-of-2 output of a funding
// transaction that directly spent that payment's price output, carries a
// zero-valued output to the same marker, and leaves a positive fee. Only the
// first such voucher per payment counts; the fee is the vote.

#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "vouch/chain.hpp"

namespace vouch {

class ScoringMode {
 public:
  enum class Kind { unweighted, weighted };

  static ScoringMode unweighted() { return ScoringMode(Kind::unweighted, Amount{}); }
  /// Throws Error(invalid_config) for c == 0.
  static ScoringMode weighted(Amount c);

  Kind kind() const noexcept { return kind_; }
  Amount constant() const noexcept { return c_; }
  bool is_weighted() const noexcept { return kind_ == Kind::weighted; }

  friend bool operator==(const ScoringMode&, const ScoringMode&) = default;

 private:
  ScoringMode(Kind k, Amount c) : kind_(k), c_(c) {}
  Kind kind_;
  Amount c_;
};

/// r / (r + c). Throws Error(invalid_config) for c == 0.
double weight(Amount voter_score, Amount c);

/// floor(r * fee / (r + c)) computed exactly.
Amount weighted_contribution(Amount voter_score, Amount c, Amount vote_fee);

struct ReputationEvent {
  Hash160 service{};
  KeyId producer{};
  KeyId voter{};
  Amount vote_fee;
  /// Score actually credited: vote_fee when unweighted.
  Amount contribution;
  std::uint64_t height = 0;
  TxId payment;
  TxId voucher;

  friend bool operator==(const ReputationEvent&, const ReputationEvent&) = default;
};

struct ServiceStats {
  Amount score;
  std::uint64_t events = 0;
  std::uint64_t last_height = 0;

  friend bool operator==(const ServiceStats&, const ServiceStats&) = default;
};

struct ProducerReputation {
  Amount total;
  std::vector<std::pair<Hash160, Amount>> breakdown;
};

class ReputationIndex {
 public:
  explicit ReputationIndex(ScoringMode mode = ScoringMode::unweighted()) : mode_(mode) {}

  const ScoringMode& mode() const noexcept { return mode_; }
  std::optional<std::uint64_t> indexed_through() const noexcept { return through_; }

  /// `block` must sit at indexed_through() + 1 (0 for a fresh index); `chain`
  /// must contain it. Throws Error(out_of_order_block).
  void index_block(const Block& block, const Chain& chain);

  Amount service_score(const Hash160& marker) const;
  /// Score of derive_service_address(url).
  Amount service_score(std::string_view url) const;
  const std::map<Hash160, ServiceStats>& services() const noexcept { return services_; }

  ProducerReputation producer(const KeyId& producer) const;
  Amount producer_score(const KeyId& producer) const;
  /// A voter's score is the producer score of the same identity.
  Amount voter_score(const KeyId& voter) const { return producer_score(voter); }
  /// Sum of raw vote fees credited to `producer`; the basis for weights.
  Amount unweighted_producer_score(const KeyId& producer) const;

  const std::vector<ReputationEvent>& events() const noexcept { return events_; }

  friend bool operator==(const ReputationIndex& a, const ReputationIndex& b) {
    return a.mode_ == b.mode_ && a.through_ == b.through_ && a.services_ == b.services_ &&
           a.producers_ == b.producers_ && a.raw_producer_ == b.raw_producer_ && a.events_ == b.events_;
  }

  /// Rebuilds state from a complete event list (used by full_rescan).
  /// `offered` lists (producer, service) pairs seen in payments, so services
  /// that were sold but never vouched for appear with a zero score.
  static ReputationIndex from_events(ScoringMode mode, std::optional<std::uint64_t> through,
                                     std::vector<ReputationEvent> events,
                                     const std::vector<std::pair<KeyId, Hash160>>& offered = {});

 private:
  struct PaymentRecord {
    Hash160 marker{};
    KeyId producer{};
    KeyId voter{};
  };

  void credit(const ReputationEvent& e);

  ScoringMode mode_;
  std::optional<std::uint64_t> through_;
  std::map<TxId, PaymentRecord> payments_;
  std::set<TxId> counted_;
  std::map<TxId, TxId> funding_;
  std::map<Hash160, ServiceStats> services_;
  std::map<KeyId, std::map<Hash160, Amount>> producers_;
  std::map<KeyId, Amount> raw_producer_;
  std::vector<ReputationEvent> events_;
};

/// Whole-chain batch pass, written independently of index_block; the
/// reference against which incremental indexing is checked.
ReputationIndex full_rescan(const Chain& chain, ScoringMode mode);

/// Incremental indexing of every block from genesis.
ReputationIndex index_chain(const Chain& chain, ScoringMode mode);

}  // namespace vouch
