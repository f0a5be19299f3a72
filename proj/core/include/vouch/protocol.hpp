#pragma once

// Service-bound payments and co-signed vouchers.
//
//   payment  P : inputs(consumer) -> [price -> producer, 0 -> S*, change -> consumer]
//   funding  F : P.out[0]         -> [incentive + vote fee -> 2-of-2(consumer, producer), rest -> producer]
//   voucher  V : F.out[0]         -> [incentive -> consumer]?, [0 -> S*]   (fee = vote fee)
//
// The producer signs F and its half of V; the voucher becomes valid only once
// the consumer adds the second signature.

#include <optional>
#include <string>

#include "vouch/chain.hpp"
#include "vouch/codec.hpp"
#include "vouch/wallet.hpp"

namespace vouch {

struct ServiceDescriptor {
  std::string url;
  Address marker;
  /// Digest of an SLA document; carried as opaque metadata.
  std::optional<Hash256> sla;

  /// Throws Error(invalid_service) for an empty url.
  static ServiceDescriptor from_url(std::string url, std::optional<Hash256> sla = std::nullopt);
};

struct ProtocolConfig {
  /// Offers whose vote fee falls below this are rejected while enforced.
  Amount minimum_vote_fee{1};
  bool enforce_minimum_fee = true;
};

struct PaymentTx {
  Transaction tx;
  TxId id;
  KeyId producer{};
  KeyId consumer{};
  Hash160 marker{};
  Amount price;

  static constexpr std::uint32_t kPriceOutput = 0;
  static constexpr std::uint32_t kMarkerOutput = 1;
  static constexpr std::uint32_t kChangeOutput = 2;

  /// Recognises the fixed three-output layout. `consumer` is the key that
  /// signed the first input, looked up through `chain`; a payment whose first
  /// input does not spend a key-hash output is not recognised.
  static std::optional<PaymentTx> recognise(const Transaction& tx, const Chain& chain);
  /// As above, with the txid already known.
  static std::optional<PaymentTx> recognise(const Transaction& tx, const TxId& id, const Chain& chain);
};

struct VoucherOffer {
  TxId payment_id;
  Transaction funding;
  /// Voucher carrying only the producer's half of the 2-of-2 signature.
  Transaction draft;
  Amount vote_fee;
  Amount incentive;
  KeyId consumer{};
  KeyId producer{};
  Hash160 marker{};

  friend bool operator==(const VoucherOffer&, const VoucherOffer&) = default;
};

/// Consumer side: spends the primary key's coins, pays `price` to the
/// producer, 0 to the service marker, change back. Locks the selected coins.
/// Throws Error(insufficient_funds).
PaymentTx build_payment(Wallet& wallet, const Chain& chain, const KeyId& producer, const ServiceDescriptor& service,
                        Amount price, Amount miner_fee);

/// Producer side. The payment must be confirmed and its price output unspent.
/// Throws payment_not_found, out1_already_spent, wrong_key, invalid_rate,
/// incentive_too_large or vote_fee_below_minimum.
VoucherOffer build_voucher_offer(const TxId& payment, const Wallet& producer_wallet, const Chain& chain, Rate rate,
                                 Amount incentive, Amount funding_miner_fee, const ProtocolConfig& config = {});

/// Adds the consumer's signature. Throws wrong_key, already_cosigned, or
/// bad_signature when the producer's half is missing or invalid.
Transaction cosign_voucher(const VoucherOffer& offer, const KeyPair& consumer);

/// Throws Error(out1_already_spent) if the payment's price output has been
/// consumed on `chain` by anything other than this offer's funding, and
/// Error(payment_not_found) if the payment is not on the chain.
void check_offer_link(const VoucherOffer& offer, const Chain& chain);

enum class DealState { ordered, paid, delivered, offer_sent, accepted, declined };
enum class DealEvent { order, pay, deliver, send_offer, cosign, decline };

/// State reached by the `order` event.
inline constexpr DealState kInitialDealState = DealState::ordered;

/// Applies one workflow transition; throws Error(illegal_transition).
DealState advance(DealState state, DealEvent event);
bool is_terminal(DealState state) noexcept;

std::string_view to_string(DealState state) noexcept;
std::string_view to_string(DealEvent event) noexcept;

}  // namespace vouch
