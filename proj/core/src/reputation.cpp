#include "vouch/reputation.hpp"

#include <algorithm>

#include "vouch/protocol.hpp"

namespace vouch {

ScoringMode ScoringMode::weighted(Amount c) {
  if (c.is_zero()) throw Error(Errc::invalid_config, "weighting constant must be positive");
  return ScoringMode(Kind::weighted, c);
}

double weight(Amount voter_score, Amount c) {
  if (c.is_zero()) throw Error(Errc::invalid_config, "weighting constant must be positive");
  const double r = static_cast<double>(voter_score.units());
  return r / (r + static_cast<double>(c.units()));
}

Amount weighted_contribution(Amount voter_score, Amount c, Amount vote_fee) {
  if (c.is_zero()) throw Error(Errc::invalid_config, "weighting constant must be positive");
  using u128 = unsigned __int128;
  const u128 num = static_cast<u128>(voter_score.units()) * vote_fee.units();
  const u128 den = static_cast<u128>(voter_score.units()) + c.units();
  return Amount(static_cast<std::uint64_t>(num / den));
}

namespace {

const Marker* zero_marker_for(const Transaction& tx, const Hash160& service) {
  for (const TxOut& out : tx.outputs) {
    const auto* m = std::get_if<Marker>(&out.lock);
    if (m != nullptr && m->service == service && out.amount.is_zero()) return m;
  }
  return nullptr;
}

Amount contribution_for(const ScoringMode& mode, Amount voter_raw, Amount fee) {
  return mode.is_weighted() ? weighted_contribution(voter_raw, mode.constant(), fee) : fee;
}

}  // namespace

void ReputationIndex::index_block(const Block& block, const Chain& chain) {
  const std::uint64_t expected = through_ ? *through_ + 1 : 0;
  if (block.height != expected) {
    throw Error(Errc::out_of_order_block,
                "expected block " + std::to_string(expected) + ", got " + std::to_string(block.height));
  }

  // Weights read the raw scores as they stood at the end of the previous block.
  std::vector<ReputationEvent> fresh;
  for (const Transaction& tx : block.transactions) {
    const TxId id = txid(tx);
    if (auto payment = PaymentTx::recognise(tx, id, chain)) {
      payments_.emplace(id, PaymentRecord{payment->marker, payment->producer, payment->consumer});
      producers_[payment->producer].try_emplace(payment->marker);
    }

    for (const TxIn& in : tx.inputs) {
      const auto f = funding_.find(in.prevout.txid);
      if (f == funding_.end()) continue;
      const TxOut* escrow = chain.output(in.prevout);
      if (escrow == nullptr || !std::holds_alternative<PayToMultisig2of2>(escrow->lock)) continue;
      const TxId& payment_id = f->second;
      if (counted_.contains(payment_id)) continue;
      const PaymentRecord& p = payments_.at(payment_id);
      if (zero_marker_for(tx, p.marker) == nullptr) continue;
      const Amount fee = chain.fee_of(id).value_or(Amount{});
      if (fee.is_zero()) continue;

      counted_.insert(payment_id);
      const auto raw = raw_producer_.find(p.voter);
      const Amount voter_raw = raw == raw_producer_.end() ? Amount{} : raw->second;
      fresh.push_back(ReputationEvent{p.marker, p.producer, p.voter, fee, contribution_for(mode_, voter_raw, fee),
                                      block.height, payment_id, id});
      break;
    }

    for (const TxIn& in : tx.inputs) {
      if (in.prevout.index == PaymentTx::kPriceOutput && payments_.contains(in.prevout.txid)) {
        funding_.emplace(id, in.prevout.txid);
      }
    }
  }

  for (const ReputationEvent& e : fresh) credit(e);
  through_ = block.height;
}

void ReputationIndex::credit(const ReputationEvent& e) {
  ServiceStats& s = services_[e.service];
  s.score += e.contribution;
  s.events += 1;
  s.last_height = std::max(s.last_height, e.height);
  producers_[e.producer][e.service] += e.contribution;
  raw_producer_[e.producer] += e.vote_fee;
  events_.push_back(e);
}

Amount ReputationIndex::service_score(const Hash160& marker) const {
  const auto it = services_.find(marker);
  return it == services_.end() ? Amount{} : it->second.score;
}

Amount ReputationIndex::service_score(std::string_view url) const {
  return service_score(derive_service_address(url).payload);
}

ProducerReputation ReputationIndex::producer(const KeyId& producer) const {
  ProducerReputation rep;
  const auto it = producers_.find(producer);
  if (it == producers_.end()) return rep;
  for (const auto& [service, score] : it->second) {
    rep.total += score;
    rep.breakdown.emplace_back(service, score);
  }
  return rep;
}

Amount ReputationIndex::producer_score(const KeyId& producer) const { return this->producer(producer).total; }

Amount ReputationIndex::unweighted_producer_score(const KeyId& producer) const {
  const auto it = raw_producer_.find(producer);
  return it == raw_producer_.end() ? Amount{} : it->second;
}

ReputationIndex ReputationIndex::from_events(ScoringMode mode, std::optional<std::uint64_t> through,
                                             std::vector<ReputationEvent> events,
                                             const std::vector<std::pair<KeyId, Hash160>>& offered) {
  ReputationIndex index(mode);
  index.through_ = through;
  for (const auto& [producer, service] : offered) index.producers_[producer].try_emplace(service);
  for (const ReputationEvent& e : events) index.credit(e);
  return index;
}

ReputationIndex full_rescan(const Chain& chain, ScoringMode mode) {
  struct Candidate {
    std::uint64_t height;
    TxId payment;
    TxId voucher;
    Amount fee;
  };

  // Pass 1: classify every transaction on the chain.
  std::map<TxId, PaymentTx> payments;
  std::map<TxId, TxId> funding_of;  // funding txid -> payment txid
  for (const Block& block : chain.blocks()) {
    const std::vector<TxId>& ids = chain.block_txids(block.height);
    for (std::size_t i = 0; i < block.transactions.size(); ++i) {
      if (auto p = PaymentTx::recognise(block.transactions[i], ids[i + 1], chain)) {
        payments.emplace(ids[i + 1], std::move(*p));
      }
    }
  }
  for (const auto& [pid, p] : payments) {
    if (auto spender = chain.spender(OutPoint{pid, PaymentTx::kPriceOutput})) funding_of.emplace(*spender, pid);
  }

  // Pass 2: first voucher per payment in chain order.
  std::vector<Candidate> counted;
  std::set<TxId> seen;
  for (const Block& block : chain.blocks()) {
    const std::vector<TxId>& ids = chain.block_txids(block.height);
    for (std::size_t t = 0; t < block.transactions.size(); ++t) {
      const Transaction& tx = block.transactions[t];
      for (const TxIn& in : tx.inputs) {
        const auto f = funding_of.find(in.prevout.txid);
        if (f == funding_of.end()) continue;
        const Transaction* funding = chain.find(f->first);
        if (in.prevout.index >= funding->outputs.size() ||
            !std::holds_alternative<PayToMultisig2of2>(funding->outputs[in.prevout.index].lock)) {
          continue;
        }
        if (seen.contains(f->second)) continue;
        const PaymentTx& p = payments.at(f->second);
        const bool tagged = std::any_of(tx.outputs.begin(), tx.outputs.end(), [&](const TxOut& o) {
          const auto* m = std::get_if<Marker>(&o.lock);
          return m != nullptr && m->service == p.marker && o.amount.is_zero();
        });
        if (!tagged) continue;

        std::uint64_t in_units = 0;
        for (const TxIn& i : tx.inputs) in_units += chain.output(i.prevout)->amount.units();
        const std::uint64_t out_units = tx.output_total().units();
        if (in_units <= out_units) continue;

        seen.insert(f->second);
        counted.push_back(Candidate{block.height, f->second, ids[t + 1], Amount(in_units - out_units)});
        break;
      }
    }
  }

  // Pass 3: score height by height so weights see only earlier heights.
  std::vector<ReputationEvent> events;
  std::map<KeyId, Amount> raw_before;
  std::size_t i = 0;
  while (i < counted.size()) {
    const std::uint64_t h = counted[i].height;
    std::size_t j = i;
    for (; j < counted.size() && counted[j].height == h; ++j) {
      const Candidate& c = counted[j];
      const PaymentTx& p = payments.at(c.payment);
      Amount credit = c.fee;
      if (mode.is_weighted()) {
        const auto r = raw_before.find(p.consumer);
        credit = weighted_contribution(r == raw_before.end() ? Amount{} : r->second, mode.constant(), c.fee);
      }
      events.push_back(ReputationEvent{p.marker, p.producer, p.consumer, c.fee, credit, h, c.payment, c.voucher});
    }
    for (std::size_t k = i; k < j; ++k) raw_before[events[k].producer] += events[k].vote_fee;
    i = j;
  }

  std::vector<std::pair<KeyId, Hash160>> offered;
  for (const auto& [pid, p] : payments) offered.emplace_back(p.producer, p.marker);
  return ReputationIndex::from_events(mode, chain.height(), std::move(events), offered);
}

ReputationIndex index_chain(const Chain& chain, ScoringMode mode) {
  ReputationIndex index(mode);
  for (const Block& b : chain.blocks()) index.index_block(b, chain);
  return index;
}

}  // namespace vouch
