#pragma once

// Deterministic agent-based runner for the payment/voucher market.
//
// Each block: deals paid in the previous block are delivered, offered and
// either co-signed or declined; then consumers (and the attacker's fake
// identities) place new orders; then the next miner in the rotation mines
// everything pending. All randomness comes from one seeded generator drawn
// in a fixed order.

#include <optional>
#include <string>
#include <vector>

#include "vouch/chain.hpp"
#include "vouch/protocol.hpp"
#include "vouch/report.hpp"
#include "vouch/reputation.hpp"
#include "vouch/store.hpp"

namespace vouch {

enum class CosignPolicy {
  if_satisfied,
  /// Co-signs regardless of delivery ("unhappy but vote").
  always,
};

struct ProducerSpec {
  std::string name;
  std::string url;
  Amount price = Amount(10'000'000);
  double success = 1.0;
  Amount funds;
};

struct ConsumerSpec {
  std::string name;
  Amount funds = Amount::coins(1);
  double purchase_rate = 0.5;
  CosignPolicy policy = CosignPolicy::if_satisfied;
  /// Buys only from this producer when set; otherwise picks uniformly.
  std::optional<std::string> producer;
};

/// Producer who buys its own service through fresh identities.
struct AttackerSpec {
  std::string name = "attacker";
  std::string url;
  Amount price = Amount(10'000'000);
  std::uint64_t identities = 1;
  /// Coins handed to the fake identities at genesis, split evenly.
  Amount budget = Amount::coins(1);
  double cosign_probability = 1.0;
  std::uint64_t deals_per_block = 1;
};

struct ProtocolParams {
  Rate rate = Rate::percent(3);
  Amount incentive = Amount(1'000'000);
  ProtocolConfig fees;
  Amount payment_fee;
  Amount funding_fee;
};

struct Scenario {
  std::uint64_t seed = 1;
  std::uint64_t blocks = 10;
  Amount subsidy = Amount::coins(50);
  std::vector<std::string> miners{"miner"};
  /// Adds the attacker to the miner rotation.
  bool attacker_mines = false;
  std::vector<ProducerSpec> producers;
  std::vector<ConsumerSpec> consumers;
  std::optional<AttackerSpec> attacker;
  ProtocolParams protocol;
  ScoringMode scoring = ScoringMode::unweighted();

  /// Throws Error(invalid_config).
  void validate() const;
};

Scenario scenario_from_json(const Json& j);
Json to_json(const Scenario& scenario);

struct AgentMetrics {
  std::string name;
  std::string role;        // producer, consumer, producer+consumer, attacker, sybil, miner
  std::string controller;  // agents sharing a controller act for one party
  KeyId key{};

  std::uint64_t payments_made = 0;
  std::uint64_t vouchers_cosigned = 0;
  std::uint64_t offers_declined = 0;
  std::uint64_t sales = 0;
  std::uint64_t vouchers_received = 0;

  Amount vote_fees_paid;
  Amount miner_fees_paid;
  Amount incentives_paid;
  Amount incentives_received;
  Amount fees_collected;

  Amount reputation;             // in the scenario's scoring mode
  Amount reputation_unweighted;
};

struct DealRecord {
  std::string producer;
  std::string consumer;
  std::uint64_t paid_height = 0;
  DealState state = kInitialDealState;
  bool satisfied = false;
  TxId payment;
  std::optional<TxId> funding;
  std::optional<TxId> voucher;
  std::string failure;  // set when an offer could not be built
};

struct SimResult {
  Scenario scenario;
  Chain chain;
  ReputationIndex index;
  UrlRegistry urls;
  std::vector<AgentMetrics> agents;
  std::vector<DealRecord> deals;
  /// Producers (and the attacker) by descending score, ties by name.
  std::vector<std::pair<std::string, Amount>> ranking;

  const AgentMetrics* agent(std::string_view name) const;
};

/// Throws Error(invalid_config) for an invalid scenario.
SimResult run(const Scenario& scenario);

struct AttackRow {
  std::string name;
  std::string role;
  Amount reputation;
  Amount fees_burned;  // vote fees + miner fees paid
  Amount vote_fees_paid;
  std::int64_t incentives_net = 0;  // received - paid, base units
  /// Share of unweighted reputation whose voters share this agent's controller.
  double self_financed_share = 0.0;
  bool self_financed = false;
};

std::vector<AttackRow> attack_report(const SimResult& result);
std::string attack_report_csv(const std::vector<AttackRow>& rows);
std::string metrics_csv(const SimResult& result);

}  // namespace vouch
