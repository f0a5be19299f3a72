#pragma once

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vouch/chain.hpp"
#include "vouch/keys.hpp"

namespace vouch {

struct NamedKey {
  std::string name;
  KeyPair key;
};

struct OwnedOutput {
  OutPoint outpoint;
  TxOut output;
};

/// Named key pairs plus a view of the pay-to-key-hash outputs they own.
/// Locked outpoints (already committed to unconfirmed transactions) are
/// excluded from coin selection.
class Wallet {
 public:
  const KeyPair& add(std::string name, const Seed& seed);
  const std::vector<NamedKey>& keys() const noexcept { return keys_; }
  bool empty() const noexcept { return keys_.empty(); }

  /// First key added. Throws Error(invalid_config) on an empty wallet.
  const KeyPair& primary() const;
  const KeyPair* find(std::string_view name) const;
  const KeyPair* find(const KeyId& id) const;

  std::vector<OwnedOutput> unspent(const Chain& chain) const;
  std::vector<OwnedOutput> unspent_for(const KeyId& key, const Chain& chain) const;
  Amount balance(const Chain& chain) const;
  Amount balance_of(const KeyId& key, const Chain& chain) const;

  void lock(const OutPoint& op) { locked_.insert(op); }
  bool is_locked(const OutPoint& op) const { return locked_.contains(op); }
  void unlock_all() { locked_.clear(); }

 private:
  std::vector<NamedKey> keys_;
  std::set<OutPoint> locked_;
};

/// Picks `owner`'s unlocked outputs in outpoint order until `target` is covered.
/// Throws Error(insufficient_funds).
std::vector<OwnedOutput> select_coins(const Wallet& wallet, const KeyId& owner, const Chain& chain, Amount target);

/// Plain one-to-one payment with change back to the sender and `fee` left
/// unassigned. Signs, locks the selected outputs, and returns the transaction.
Transaction build_transfer(Wallet& wallet, const KeyPair& from, const Chain& chain, const KeyId& to, Amount amount,
                           Amount fee);

}  // namespace vouch
