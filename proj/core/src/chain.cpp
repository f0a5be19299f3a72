#include "vouch/chain.hpp"

#include <algorithm>

namespace vouch {

namespace {

Validation fail(Errc code, std::string detail) { return Validation{code, std::move(detail), {}}; }

void append_u64(Bytes& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::string describe(const OutPoint& op) { return op.txid.hex() + ":" + std::to_string(op.index); }

}  // namespace

Hash256 Block::digest() const {
  Bytes buf;
  append_u64(buf, height);
  buf.insert(buf.end(), prev.begin(), prev.end());
  const Bytes cb = serialize_with_signatures(coinbase);
  buf.insert(buf.end(), cb.begin(), cb.end());
  for (const Transaction& tx : transactions) {
    const Bytes body = serialize_with_signatures(tx);
    buf.insert(buf.end(), body.begin(), body.end());
  }
  return sha256d(buf);
}

Validation verify_input(const Transaction& tx, std::size_t index, const TxOut& spent) {
  const TxIn& in = tx.inputs.at(index);
  if (std::holds_alternative<Marker>(spent.lock)) {
    return fail(Errc::bad_signature, "marker output " + describe(in.prevout) + " is unspendable");
  }
  if (in.signatures.empty()) {
    return fail(Errc::bad_signature, "input " + std::to_string(index) + " is unsigned");
  }

  std::vector<KeyId> required;
  if (const auto* p2kh = std::get_if<PayToKeyHash>(&spent.lock)) {
    required = {p2kh->key};
  } else {
    const auto& ms = std::get<PayToMultisig2of2>(spent.lock);
    required = {ms.first, ms.second};
  }

  const Hash256 msg = signature_hash(tx, index);
  std::vector<bool> satisfied(required.size(), false);
  for (const InputSignature& s : in.signatures) {
    const KeyId signer = key_id(s.key);
    const auto it = std::find(required.begin(), required.end(), signer);
    if (it == required.end()) {
      return fail(Errc::bad_signature, "input " + std::to_string(index) + " carries a signature from an unrelated key");
    }
    if (!verify(s.sig, msg, s.key)) {
      return fail(Errc::bad_signature, "input " + std::to_string(index) + " signature does not verify");
    }
    for (std::size_t k = 0; k < required.size(); ++k) {
      if (required[k] == signer) satisfied[k] = true;
    }
  }
  if (!std::all_of(satisfied.begin(), satisfied.end(), [](bool b) { return b; })) {
    return fail(Errc::missing_cosignature, "input " + std::to_string(index) + " lacks one of the 2-of-2 signatures");
  }
  return {};
}

// Overlay used while validating a batch: outputs created and spent by earlier
// transactions of the batch shadow the chain's UTXO set.
class Chain::View {
 public:
  explicit View(const Chain& chain) : chain_(chain) {}

  Validation check(const Transaction& tx) const {
    if (tx.is_coinbase) return fail(Errc::coinbase_not_allowed, "coinbase transactions are produced by mining only");
    if (tx.inputs.empty()) return fail(Errc::malformed, "transaction has no inputs");
    if (tx.outputs.empty()) return fail(Errc::malformed, "transaction has no outputs");

    std::set<OutPoint> seen;
    std::vector<const TxOut*> spent;
    spent.reserve(tx.inputs.size());
    for (const TxIn& in : tx.inputs) {
      if (!seen.insert(in.prevout).second) {
        return fail(Errc::double_spend, "outpoint " + describe(in.prevout) + " spent twice in one transaction");
      }
      if (spent_.contains(in.prevout) || chain_.spent_.contains(in.prevout)) {
        return fail(Errc::double_spend, "outpoint " + describe(in.prevout) + " already spent");
      }
      const TxOut* out = find(in.prevout);
      if (out == nullptr) return fail(Errc::missing_utxo, "outpoint " + describe(in.prevout) + " does not exist");
      spent.push_back(out);
    }

    for (std::size_t i = 0; i < tx.inputs.size(); ++i) {
      Validation v = verify_input(tx, i, *spent[i]);
      if (!v.ok()) return v;
    }

    Amount in_total;
    Amount out_total;
    try {
      for (const TxOut* out : spent) in_total += out->amount;
      out_total = tx.output_total();
    } catch (const Error& e) {
      return fail(Errc::value_overflow, e.what());
    }
    if (out_total > in_total) {
      return fail(Errc::value_overflow, "outputs " + std::to_string(out_total.units()) + " exceed inputs " +
                                            std::to_string(in_total.units()));
    }
    return Validation{std::nullopt, {}, in_total - out_total};
  }

  void apply(const Transaction& tx) {
    for (const TxIn& in : tx.inputs) spent_.insert(in.prevout);
    const TxId id = txid(tx);
    for (std::size_t i = 0; i < tx.outputs.size(); ++i) {
      added_.emplace(OutPoint{id, static_cast<std::uint32_t>(i)}, tx.outputs[i]);
    }
  }

 private:
  const TxOut* find(const OutPoint& op) const {
    if (auto it = added_.find(op); it != added_.end()) return &it->second;
    return chain_.unspent(op);
  }

  const Chain& chain_;
  std::map<OutPoint, TxOut> added_;
  std::set<OutPoint> spent_;
};

Chain Chain::create(const ChainConfig& config) {
  Block genesis;
  genesis.height = 0;
  genesis.coinbase.is_coinbase = true;
  genesis.coinbase.coinbase_height = 0;
  for (const Allocation& a : config.allocations) {
    genesis.coinbase.outputs.push_back(TxOut{a.amount, PayToKeyHash{a.key}});
  }
  Chain chain;
  chain.config_ = config;
  chain.blocks_.push_back(genesis);
  chain.fees_.push_back(Amount{});
  chain.apply_block(chain.blocks_.back(), {});
  return chain;
}

Chain Chain::from_genesis(const Block& genesis, Amount subsidy) {
  if (genesis.height != 0 || !genesis.transactions.empty() || !genesis.coinbase.is_coinbase ||
      genesis.coinbase.coinbase_height != 0 || genesis.prev != Hash256{}) {
    throw Error(Errc::corrupt_chain, "first block is not a genesis block");
  }
  ChainConfig config;
  config.subsidy = subsidy;
  for (const TxOut& out : genesis.coinbase.outputs) {
    const auto* p2kh = std::get_if<PayToKeyHash>(&out.lock);
    if (p2kh == nullptr) throw Error(Errc::corrupt_chain, "genesis allocation must pay a key hash");
    config.allocations.push_back(Allocation{p2kh->key, out.amount});
  }
  Chain chain = create(config);
  if (chain.tip() != genesis) throw Error(Errc::corrupt_chain, "genesis block does not match its allocations");
  return chain;
}

const TxOut* Chain::unspent(const OutPoint& op) const {
  const auto it = utxos_.find(op);
  return it == utxos_.end() ? nullptr : &it->second;
}

const Transaction* Chain::find(const TxId& id) const {
  const auto loc = locate(id);
  if (!loc) return nullptr;
  const Block& b = blocks_[loc->height];
  return loc->position == 0 ? &b.coinbase : &b.transactions[loc->position - 1];
}

std::optional<TxLocation> Chain::locate(const TxId& id) const {
  const auto it = locations_.find(id);
  if (it == locations_.end()) return std::nullopt;
  return it->second;
}

std::optional<TxId> Chain::spender(const OutPoint& op) const {
  const auto it = spent_.find(op);
  if (it == spent_.end()) return std::nullopt;
  return it->second;
}

const TxOut* Chain::output(const OutPoint& op) const {
  const Transaction* tx = find(op.txid);
  if (tx == nullptr || op.index >= tx->outputs.size()) return nullptr;
  return &tx->outputs[op.index];
}

std::vector<OutPoint> Chain::unspent_for(const KeyId& key) const {
  const auto it = by_key_.find(key);
  if (it == by_key_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

std::optional<Amount> Chain::fee_of(const TxId& id) const {
  const auto it = tx_fees_.find(id);
  if (it == tx_fees_.end()) return std::nullopt;
  return it->second;
}

Validation Chain::validate(const Transaction& tx) const { return View(*this).check(tx); }

void Chain::apply_block(const Block& b, const std::vector<Amount>& tx_fees) {
  std::vector<TxId>& ids = txids_.emplace_back();
  ids.reserve(b.transactions.size() + 1);
  ids.push_back(txid(b.coinbase));
  apply(b.coinbase, ids.back(), b.height, 0, Amount{});
  for (std::size_t i = 0; i < b.transactions.size(); ++i) {
    ids.push_back(txid(b.transactions[i]));
    apply(b.transactions[i], ids.back(), b.height, i + 1, tx_fees[i]);
  }
}

void Chain::apply(const Transaction& tx, const TxId& id, std::uint64_t height, std::size_t position, Amount fee) {
  for (const TxIn& in : tx.inputs) {
    const auto it = utxos_.find(in.prevout);
    supply_ -= it->second.amount;
    if (const auto* p2kh = std::get_if<PayToKeyHash>(&it->second.lock)) {
      by_key_[p2kh->key].erase(in.prevout);
    }
    utxos_.erase(it);
    spent_.emplace(in.prevout, id);
  }
  for (std::size_t i = 0; i < tx.outputs.size(); ++i) {
    const OutPoint op{id, static_cast<std::uint32_t>(i)};
    utxos_.emplace(op, tx.outputs[i]);
    supply_ += tx.outputs[i].amount;
    if (const auto* p2kh = std::get_if<PayToKeyHash>(&tx.outputs[i].lock)) by_key_[p2kh->key].insert(op);
  }
  locations_.emplace(id, TxLocation{height, position});
  if (!tx.is_coinbase) tx_fees_.emplace(id, fee);
}

const Block& Chain::mine(std::span<const Transaction> pending, const KeyId& miner) {
  View view(*this);
  Amount fees;
  std::vector<Amount> tx_fees;
  tx_fees.reserve(pending.size());
  for (const Transaction& tx : pending) {
    const Validation v = view.check(tx);
    if (!v.ok()) throw BlockRejected(*v.error, txid(tx), v.detail);
    view.apply(tx);
    fees += v.fee;
    tx_fees.push_back(v.fee);
  }

  Block block;
  block.height = height() + 1;
  block.prev = tip().digest();
  block.coinbase.is_coinbase = true;
  block.coinbase.coinbase_height = block.height;
  block.coinbase.outputs.push_back(TxOut{config_.subsidy + fees, PayToKeyHash{miner}});
  block.transactions.assign(pending.begin(), pending.end());

  blocks_.push_back(std::move(block));
  fees_.push_back(fees);
  const Block& b = blocks_.back();
  apply_block(b, tx_fees);
  return b;
}

void Chain::append(const Block& block) {
  if (block.height != height() + 1) {
    throw Error(Errc::corrupt_chain, "block height " + std::to_string(block.height) + " does not follow " +
                                         std::to_string(height()));
  }
  if (block.prev != tip().digest()) {
    throw Error(Errc::corrupt_chain, "block " + std::to_string(block.height) + " does not link to the tip");
  }
  if (!block.coinbase.is_coinbase || !block.coinbase.inputs.empty() ||
      block.coinbase.coinbase_height != block.height) {
    throw Error(Errc::corrupt_chain, "block " + std::to_string(block.height) + " has a malformed coinbase");
  }

  View view(*this);
  Amount fees;
  std::vector<Amount> tx_fees;
  for (const Transaction& tx : block.transactions) {
    const Validation v = view.check(tx);
    if (!v.ok()) throw BlockRejected(*v.error, txid(tx), v.detail);
    view.apply(tx);
    fees += v.fee;
    tx_fees.push_back(v.fee);
  }
  if (block.coinbase.output_total() != config_.subsidy + fees) {
    throw Error(Errc::corrupt_chain, "coinbase of block " + std::to_string(block.height) +
                                         " does not equal subsidy plus fees");
  }

  blocks_.push_back(block);
  fees_.push_back(fees);
  const Block& b = blocks_.back();
  apply_block(b, tx_fees);
}

Chain new_chain(const ChainConfig& config) { return Chain::create(config); }

Validation validate_transaction(const Transaction& tx, const Chain& chain) { return chain.validate(tx); }

const Block& mine_block(Chain& chain, std::span<const Transaction> pending, const KeyId& miner) {
  return chain.mine(pending, miner);
}

void sign_input(Transaction& tx, std::size_t index, const KeyPair& key, const TxOut& spent) {
  if (index >= tx.inputs.size()) throw Error(Errc::wrong_key, "input index out of range");
  const KeyId id = key.id();
  bool matches = false;
  if (const auto* p2kh = std::get_if<PayToKeyHash>(&spent.lock)) {
    matches = p2kh->key == id;
  } else if (const auto* ms = std::get_if<PayToMultisig2of2>(&spent.lock)) {
    matches = ms->first == id || ms->second == id;
  }
  if (!matches) throw Error(Errc::wrong_key, "key " + to_hex(id) + " does not match the output lock");

  const InputSignature sig{key.public_key(), key.sign(signature_hash(tx, index))};
  auto& sigs = tx.inputs[index].signatures;
  const auto it = std::find_if(sigs.begin(), sigs.end(), [&](const InputSignature& s) { return s.key == sig.key; });
  if (it != sigs.end()) {
    *it = sig;
  } else {
    sigs.push_back(sig);
  }
}

void sign_input(Transaction& tx, std::size_t index, const KeyPair& key, const Chain& chain) {
  if (index >= tx.inputs.size()) throw Error(Errc::wrong_key, "input index out of range");
  const TxOut* spent = chain.output(tx.inputs[index].prevout);
  if (spent == nullptr) throw Error(Errc::missing_utxo, "spent output not found in chain");
  sign_input(tx, index, key, *spent);
}

Validation verify_signatures(const Transaction& tx, const Chain& chain) {
  for (std::size_t i = 0; i < tx.inputs.size(); ++i) {
    const TxOut* spent = chain.output(tx.inputs[i].prevout);
    if (spent == nullptr) return fail(Errc::missing_utxo, "input " + std::to_string(i) + " spends an unknown output");
    Validation v = verify_input(tx, i, *spent);
    if (!v.ok()) return v;
  }
  return {};
}

}  // namespace vouch
