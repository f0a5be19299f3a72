#include "vouch/transaction.hpp"

#include <type_traits>

namespace vouch {

namespace {

class Writer {
 public:
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void bytes(ByteView data) {
    const auto n = static_cast<std::uint32_t>(data.size());
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
    buf_.insert(buf_.end(), data.begin(), data.end());
  }
  Bytes take() { return std::move(buf_); }

 private:
  Bytes buf_;
};

void write_body(Writer& w, const Transaction& tx) {
  w.u64(tx.inputs.size());
  for (const TxIn& in : tx.inputs) {
    w.bytes(in.prevout.txid.bytes);
    w.u64(in.prevout.index);
  }
  w.u64(tx.outputs.size());
  for (const TxOut& out : tx.outputs) {
    w.u64(out.amount.units());
    w.u64(out.lock.index());
    std::visit(
        [&w](const auto& lock) {
          using T = std::decay_t<decltype(lock)>;
          if constexpr (std::is_same_v<T, PayToKeyHash>) {
            w.bytes(lock.key);
          } else if constexpr (std::is_same_v<T, PayToMultisig2of2>) {
            w.bytes(lock.first);
            w.bytes(lock.second);
          } else {
            w.bytes(lock.service);
          }
        },
        out.lock);
  }
  w.u64(tx.is_coinbase ? 1 : 0);
  w.u64(tx.coinbase_height);
}

}  // namespace

Amount Transaction::output_total() const {
  Amount total;
  for (const TxOut& out : outputs) total += out.amount;
  return total;
}

Bytes canonical_serialize(const Transaction& tx) {
  Writer w;
  write_body(w, tx);
  return w.take();
}

Bytes serialize_with_signatures(const Transaction& tx) {
  Writer w;
  write_body(w, tx);
  for (const TxIn& in : tx.inputs) {
    w.u64(in.signatures.size());
    for (const InputSignature& s : in.signatures) {
      w.bytes(s.key);
      w.bytes(s.sig);
    }
  }
  return w.take();
}

TxId txid(const Transaction& tx) { return TxId{sha256d(canonical_serialize(tx))}; }

Hash256 signature_hash(const Transaction& tx, std::size_t index) {
  Writer w;
  write_body(w, tx);
  w.u64(index);
  return sha256d(w.take());
}

}  // namespace vouch
