#include "vouch/wallet.hpp"

#include <algorithm>

namespace vouch {

const KeyPair& Wallet::add(std::string name, const Seed& seed) {
  if (find(name) != nullptr) throw Error(Errc::invalid_config, "wallet already has a key named '" + name + "'");
  keys_.push_back(NamedKey{std::move(name), KeyPair::from_seed(seed)});
  return keys_.back().key;
}

const KeyPair& Wallet::primary() const {
  if (keys_.empty()) throw Error(Errc::invalid_config, "wallet has no keys");
  return keys_.front().key;
}

const KeyPair* Wallet::find(std::string_view name) const {
  const auto it = std::find_if(keys_.begin(), keys_.end(), [&](const NamedKey& k) { return k.name == name; });
  return it == keys_.end() ? nullptr : &it->key;
}

const KeyPair* Wallet::find(const KeyId& id) const {
  const auto it = std::find_if(keys_.begin(), keys_.end(), [&](const NamedKey& k) { return k.key.id() == id; });
  return it == keys_.end() ? nullptr : &it->key;
}

std::vector<OwnedOutput> Wallet::unspent_for(const KeyId& key, const Chain& chain) const {
  std::vector<OwnedOutput> out;
  for (const OutPoint& op : chain.unspent_for(key)) {
    if (locked_.contains(op)) continue;
    out.push_back(OwnedOutput{op, *chain.unspent(op)});
  }
  return out;
}

std::vector<OwnedOutput> Wallet::unspent(const Chain& chain) const {
  std::vector<OwnedOutput> out;
  for (const NamedKey& k : keys_) {
    auto mine = unspent_for(k.key.id(), chain);
    out.insert(out.end(), mine.begin(), mine.end());
  }
  return out;
}

Amount Wallet::balance_of(const KeyId& key, const Chain& chain) const {
  Amount total;
  for (const OutPoint& op : chain.unspent_for(key)) total += chain.unspent(op)->amount;
  return total;
}

Amount Wallet::balance(const Chain& chain) const {
  Amount total;
  for (const NamedKey& k : keys_) total += balance_of(k.key.id(), chain);
  return total;
}

std::vector<OwnedOutput> select_coins(const Wallet& wallet, const KeyId& owner, const Chain& chain, Amount target) {
  std::vector<OwnedOutput> picked;
  Amount total;
  for (OwnedOutput& o : wallet.unspent_for(owner, chain)) {
    if (total >= target && !picked.empty()) break;
    if (o.output.amount.is_zero()) continue;
    total += o.output.amount;
    picked.push_back(std::move(o));
  }
  if (total < target || picked.empty()) {
    throw Error(Errc::insufficient_funds, "need " + format_coins(target) + ", spendable " + format_coins(total));
  }
  return picked;
}

Transaction build_transfer(Wallet& wallet, const KeyPair& from, const Chain& chain, const KeyId& to, Amount amount,
                           Amount fee) {
  const auto coins = select_coins(wallet, from.id(), chain, amount + fee);
  Transaction tx;
  Amount in_total;
  for (const OwnedOutput& c : coins) {
    tx.inputs.push_back(TxIn{c.outpoint, {}});
    in_total += c.output.amount;
  }
  tx.outputs.push_back(TxOut{amount, PayToKeyHash{to}});
  tx.outputs.push_back(TxOut{in_total - amount - fee, PayToKeyHash{from.id()}});
  for (std::size_t i = 0; i < coins.size(); ++i) sign_input(tx, i, from, coins[i].output);
  for (const OwnedOutput& c : coins) wallet.lock(c.outpoint);
  return tx;
}

}  // namespace vouch
