#include "vouch/protocol.hpp"

#include <algorithm>

namespace vouch {

ServiceDescriptor ServiceDescriptor::from_url(std::string url, std::optional<Hash256> sla) {
  Address marker = derive_service_address(url);
  return ServiceDescriptor{std::move(url), marker, sla};
}

std::optional<PaymentTx> PaymentTx::recognise(const Transaction& tx, const Chain& chain) {
  return recognise(tx, txid(tx), chain);
}

std::optional<PaymentTx> PaymentTx::recognise(const Transaction& tx, const TxId& id, const Chain& chain) {
  if (tx.is_coinbase || tx.inputs.empty() || tx.outputs.size() != 3) return std::nullopt;
  const auto* price = std::get_if<PayToKeyHash>(&tx.outputs[kPriceOutput].lock);
  const auto* marker = std::get_if<Marker>(&tx.outputs[kMarkerOutput].lock);
  const auto* change = std::get_if<PayToKeyHash>(&tx.outputs[kChangeOutput].lock);
  if (price == nullptr || marker == nullptr || change == nullptr) return std::nullopt;
  if (!tx.outputs[kMarkerOutput].amount.is_zero()) return std::nullopt;

  const TxOut* funded_by = chain.output(tx.inputs.front().prevout);
  if (funded_by == nullptr) return std::nullopt;
  const auto* payer = std::get_if<PayToKeyHash>(&funded_by->lock);
  if (payer == nullptr) return std::nullopt;

  return PaymentTx{tx, id, price->key, payer->key, marker->service, tx.outputs[kPriceOutput].amount};
}

PaymentTx build_payment(Wallet& wallet, const Chain& chain, const KeyId& producer, const ServiceDescriptor& service,
                        Amount price, Amount miner_fee) {
  if (service.url.empty() || derive_service_address(service.url) != service.marker) {
    throw Error(Errc::invalid_service, "service marker does not match its url");
  }
  const KeyPair& consumer = wallet.primary();
  const auto coins = select_coins(wallet, consumer.id(), chain, price + miner_fee);

  Transaction tx;
  Amount in_total;
  for (const OwnedOutput& c : coins) {
    tx.inputs.push_back(TxIn{c.outpoint, {}});
    in_total += c.output.amount;
  }
  tx.outputs.push_back(TxOut{price, PayToKeyHash{producer}});
  tx.outputs.push_back(TxOut{Amount{}, Marker{service.marker.payload}});
  tx.outputs.push_back(TxOut{in_total - price - miner_fee, PayToKeyHash{consumer.id()}});
  for (std::size_t i = 0; i < coins.size(); ++i) sign_input(tx, i, consumer, coins[i].output);
  for (const OwnedOutput& c : coins) wallet.lock(c.outpoint);

  const TxId id = txid(tx);
  return PaymentTx{std::move(tx), id, producer, consumer.id(), service.marker.payload, price};
}

VoucherOffer build_voucher_offer(const TxId& payment_id, const Wallet& producer_wallet, const Chain& chain, Rate rate,
                                 Amount incentive, Amount funding_miner_fee, const ProtocolConfig& config) {
  if (!rate.in_unit_interval()) throw Error(Errc::invalid_rate, "rate " + rate.text() + " is outside (0, 1]");

  const Transaction* tx = chain.find(payment_id);
  if (tx == nullptr) throw Error(Errc::payment_not_found, "payment " + payment_id.hex() + " is not confirmed");
  const auto payment = PaymentTx::recognise(*tx, chain);
  if (!payment) throw Error(Errc::payment_not_found, "transaction " + payment_id.hex() + " is not a payment");

  const OutPoint out1{payment_id, PaymentTx::kPriceOutput};
  if (chain.spender(out1)) throw Error(Errc::out1_already_spent, "price output of " + payment_id.hex() + " is spent");

  const KeyPair* producer = producer_wallet.find(payment->producer);
  if (producer == nullptr) throw Error(Errc::wrong_key, "wallet does not control the payment's producer key");

  const Amount vote_fee = rate.apply(payment->price);
  if (config.enforce_minimum_fee && vote_fee < config.minimum_vote_fee) {
    throw Error(Errc::vote_fee_below_minimum,
                "vote fee " + std::to_string(vote_fee.units()) + " is below the minimum " +
                    std::to_string(config.minimum_vote_fee.units()));
  }
  const Amount escrow = incentive + vote_fee;
  if (escrow + funding_miner_fee > payment->price) {
    throw Error(Errc::incentive_too_large, "incentive + vote fee + funding fee exceed the price");
  }

  VoucherOffer offer;
  offer.payment_id = payment_id;
  offer.vote_fee = vote_fee;
  offer.incentive = incentive;
  offer.consumer = payment->consumer;
  offer.producer = payment->producer;
  offer.marker = payment->marker;

  offer.funding.inputs.push_back(TxIn{out1, {}});
  offer.funding.outputs.push_back(TxOut{escrow, PayToMultisig2of2{payment->consumer, payment->producer}});
  offer.funding.outputs.push_back(
      TxOut{payment->price - escrow - funding_miner_fee, PayToKeyHash{payment->producer}});
  sign_input(offer.funding, 0, *producer, tx->outputs[PaymentTx::kPriceOutput]);

  offer.draft.inputs.push_back(TxIn{OutPoint{txid(offer.funding), 0}, {}});
  if (!incentive.is_zero()) offer.draft.outputs.push_back(TxOut{incentive, PayToKeyHash{payment->consumer}});
  offer.draft.outputs.push_back(TxOut{Amount{}, Marker{payment->marker}});
  sign_input(offer.draft, 0, *producer, offer.funding.outputs[0]);
  return offer;
}

Transaction cosign_voucher(const VoucherOffer& offer, const KeyPair& consumer) {
  if (consumer.id() != offer.consumer) throw Error(Errc::wrong_key, "key is not the offer's consumer");
  if (offer.draft.inputs.size() != 1 || offer.funding.outputs.empty() ||
      offer.draft.inputs[0].prevout != OutPoint{txid(offer.funding), 0}) {
    throw Error(Errc::malformed, "voucher draft does not spend the offer's escrow output");
  }

  const auto& sigs = offer.draft.inputs[0].signatures;
  const bool cosigned = std::any_of(sigs.begin(), sigs.end(),
                                    [&](const InputSignature& s) { return key_id(s.key) == offer.consumer; });
  if (cosigned) throw Error(Errc::already_cosigned, "voucher already carries the consumer's signature");

  const Hash256 msg = signature_hash(offer.draft, 0);
  const bool producer_signed = std::any_of(sigs.begin(), sigs.end(), [&](const InputSignature& s) {
    return key_id(s.key) == offer.producer && verify(s.sig, msg, s.key);
  });
  if (!producer_signed) throw Error(Errc::bad_signature, "voucher draft lacks a valid producer signature");

  Transaction voucher = offer.draft;
  sign_input(voucher, 0, consumer, offer.funding.outputs[0]);
  return voucher;
}

void check_offer_link(const VoucherOffer& offer, const Chain& chain) {
  const Transaction* tx = chain.find(offer.payment_id);
  const auto payment = tx ? PaymentTx::recognise(*tx, chain) : std::nullopt;
  if (!payment) throw Error(Errc::payment_not_found, "payment " + offer.payment_id.hex() + " is not on the chain");
  if (payment->marker != offer.marker || payment->producer != offer.producer || payment->consumer != offer.consumer) {
    throw Error(Errc::payment_not_found, "offer does not match payment " + offer.payment_id.hex());
  }
  const auto spender = chain.spender(OutPoint{offer.payment_id, PaymentTx::kPriceOutput});
  if (spender && *spender != txid(offer.funding)) {
    throw Error(Errc::out1_already_spent, "price output was spent by " + spender->hex());
  }
}

DealState advance(DealState state, DealEvent event) {
  using S = DealState;
  using E = DealEvent;
  switch (state) {
    case S::ordered:
      if (event == E::pay) return S::paid;
      break;
    case S::paid:
      if (event == E::deliver) return S::delivered;
      break;
    case S::delivered:
      if (event == E::send_offer) return S::offer_sent;
      break;
    case S::offer_sent:
      if (event == E::cosign) return S::accepted;
      if (event == E::decline) return S::declined;
      break;
    case S::accepted:
    case S::declined:
      break;
  }
  throw Error(Errc::illegal_transition,
              std::string(to_string(event)) + " is not allowed in state " + std::string(to_string(state)));
}

bool is_terminal(DealState state) noexcept { return state == DealState::accepted || state == DealState::declined; }

std::string_view to_string(DealState state) noexcept {
  switch (state) {
    case DealState::ordered: return "ordered";
    case DealState::paid: return "paid";
    case DealState::delivered: return "delivered";
    case DealState::offer_sent: return "offer-sent";
    case DealState::accepted: return "accepted";
    case DealState::declined: return "declined";
  }
  return "unknown";
}

std::string_view to_string(DealEvent event) noexcept {
  switch (event) {
    case DealEvent::order: return "order";
    case DealEvent::pay: return "pay";
    case DealEvent::deliver: return "deliver";
    case DealEvent::send_offer: return "send-offer";
    case DealEvent::cosign: return "cosign";
    case DealEvent::decline: return "decline";
  }
  return "unknown";
}

}  // namespace vouch
