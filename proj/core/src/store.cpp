#include "vouch/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fstream>
#include <sstream>

namespace vouch {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::parse_error, what); }

template <std::size_t N>
std::array<std::uint8_t, N> hex_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) bad(std::string("missing hex field '") + key + "'");
  return array_from_hex<N>(j.at(key).get<std::string>());
}

std::uint64_t uint_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_unsigned()) bad(std::string("missing integer field '") + key + "'");
  return j.at(key).get<std::uint64_t>();
}

const Json& array_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) bad(std::string("missing array field '") + key + "'");
  return j.at(key);
}

Json lock_to_json(const OutputLock& lock) {
  Json j;
  if (const auto* p = std::get_if<PayToKeyHash>(&lock)) {
    j["type"] = "p2kh";
    j["key"] = to_hex(p->key);
  } else if (const auto* m = std::get_if<PayToMultisig2of2>(&lock)) {
    j["type"] = "multisig2of2";
    j["keys"] = Json::array({to_hex(m->first), to_hex(m->second)});
  } else {
    j["type"] = "marker";
    j["service"] = to_hex(std::get<Marker>(lock).service);
  }
  return j;
}

OutputLock lock_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("type")) bad("output lock without a type");
  const std::string type = j.at("type").get<std::string>();
  if (type == "p2kh") return PayToKeyHash{hex_field<20>(j, "key")};
  if (type == "marker") return Marker{hex_field<20>(j, "service")};
  if (type == "multisig2of2") {
    const Json& keys = array_field(j, "keys");
    if (keys.size() != 2) bad("multisig2of2 needs exactly two keys");
    return PayToMultisig2of2{array_from_hex<20>(keys[0].get<std::string>()),
                             array_from_hex<20>(keys[1].get<std::string>())};
  }
  bad("unknown lock type '" + type + "'");
}

class FileLock {
 public:
  explicit FileLock(const std::filesystem::path& path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0) throw Error(Errc::io_error, "cannot open " + path.string());
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw Error(Errc::io_error, "cannot lock " + path.string());
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace

Json to_json(const Transaction& tx) {
  Json j;
  j["txid"] = txid(tx).hex();
  j["coinbase"] = tx.is_coinbase;
  if (tx.is_coinbase) j["coinbase_height"] = tx.coinbase_height;
  Json inputs = Json::array();
  for (const TxIn& in : tx.inputs) {
    Json ji;
    ji["txid"] = in.prevout.txid.hex();
    ji["index"] = in.prevout.index;
    Json sigs = Json::array();
    for (const InputSignature& s : in.signatures) {
      sigs.push_back(Json{{"pubkey", to_hex(s.key)}, {"sig", to_hex(s.sig)}});
    }
    ji["signatures"] = std::move(sigs);
    inputs.push_back(std::move(ji));
  }
  j["inputs"] = std::move(inputs);
  Json outputs = Json::array();
  for (const TxOut& out : tx.outputs) {
    outputs.push_back(Json{{"amount", out.amount.units()}, {"lock", lock_to_json(out.lock)}});
  }
  j["outputs"] = std::move(outputs);
  return j;
}

Transaction transaction_from_json(const Json& j) {
  if (!j.is_object()) bad("transaction is not an object");
  Transaction tx;
  tx.is_coinbase = j.value("coinbase", false);
  if (tx.is_coinbase) tx.coinbase_height = uint_field(j, "coinbase_height");
  for (const Json& ji : array_field(j, "inputs")) {
    TxIn in;
    in.prevout.txid = TxId{hex_field<32>(ji, "txid")};
    const std::uint64_t index = uint_field(ji, "index");
    if (index > UINT32_MAX) bad("output index out of range");
    in.prevout.index = static_cast<std::uint32_t>(index);
    for (const Json& js : array_field(ji, "signatures")) {
      in.signatures.push_back(InputSignature{hex_field<32>(js, "pubkey"), hex_field<64>(js, "sig")});
    }
    tx.inputs.push_back(std::move(in));
  }
  for (const Json& jo : array_field(j, "outputs")) {
    if (!jo.contains("lock")) bad("output without a lock");
    tx.outputs.push_back(TxOut{Amount(uint_field(jo, "amount")), lock_from_json(jo.at("lock"))});
  }
  if (j.contains("txid") && j.at("txid").get<std::string>() != txid(tx).hex()) {
    bad("stored txid " + j.at("txid").get<std::string>() + " does not match the transaction body");
  }
  return tx;
}

Json to_json(const Block& block) {
  Json j;
  j["height"] = block.height;
  j["prev"] = to_hex(block.prev);
  j["digest"] = to_hex(block.digest());
  j["coinbase"] = to_json(block.coinbase);
  Json txs = Json::array();
  for (const Transaction& tx : block.transactions) txs.push_back(to_json(tx));
  j["transactions"] = std::move(txs);
  return j;
}

Block block_from_json(const Json& j) {
  if (!j.is_object()) bad("block is not an object");
  Block b;
  b.height = uint_field(j, "height");
  b.prev = hex_field<32>(j, "prev");
  if (!j.contains("coinbase")) bad("block without coinbase");
  b.coinbase = transaction_from_json(j.at("coinbase"));
  for (const Json& jt : array_field(j, "transactions")) b.transactions.push_back(transaction_from_json(jt));
  if (j.contains("digest") && hex_field<32>(j, "digest") != b.digest()) bad("stored block digest does not match");
  return b;
}

std::string block_line(const Block& block, const Chain& chain) {
  Json j = to_json(block);
  if (block.height == 0) {
    Json with_config;
    for (auto it = j.begin(); it != j.end(); ++it) {
      with_config[it.key()] = it.value();
      if (it.key() == "digest") with_config["subsidy"] = chain.subsidy().units();
    }
    j = std::move(with_config);
  }
  return j.dump();
}

void write_chain(const Chain& chain, std::ostream& out) {
  for (const Block& b : chain.blocks()) out << block_line(b, chain) << '\n';
}

Chain read_chain(std::istream& in) {
  std::string line;
  std::optional<Chain> chain;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      bad("line " + std::to_string(lineno) + ": " + e.what());
    }
    const Block block = block_from_json(j);
    if (!chain) {
      chain = Chain::from_genesis(block, Amount(uint_field(j, "subsidy")));
    } else {
      chain->append(block);
    }
  }
  if (!chain) bad("chain file is empty");
  return std::move(*chain);
}

Chain load_chain(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot read chain file " + path.string());
  return read_chain(in);
}

void save_chain(const Chain& chain, const std::filesystem::path& path) {
  std::ostringstream out;
  write_chain(chain, out);
  FileLock lock(path);
  write_text_file(path, out.str());
}

void append_tip(const Chain& chain, const std::filesystem::path& path) {
  FileLock lock(path);
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error(Errc::io_error, "cannot append to " + path.string());
  out << block_line(chain.tip(), chain) << '\n';
}

Json to_json(const Wallet& wallet) {
  Json keys = Json::array();
  for (const NamedKey& k : wallet.keys()) {
    keys.push_back(Json{{"name", k.name}, {"seed", to_hex(k.key.seed())}, {"address", k.key.address().text()}});
  }
  return Json{{"keys", std::move(keys)}};
}

Wallet wallet_from_json(const Json& j) {
  Wallet w;
  if (!j.is_object()) bad("wallet is not an object");
  for (const Json& k : array_field(j, "keys")) {
    if (!k.contains("name") || !k.at("name").is_string()) bad("wallet key without a name");
    w.add(k.at("name").get<std::string>(), hex_field<32>(k, "seed"));
  }
  return w;
}

Wallet load_wallet(const std::filesystem::path& path) { return wallet_from_json(read_json_file(path)); }

void save_wallet(const Wallet& wallet, const std::filesystem::path& path) {
  write_text_file(path, to_json(wallet).dump(2) + "\n");
}

Json to_json(const VoucherOffer& offer) {
  Json j;
  j["type"] = "voucher-offer";
  j["payment_txid"] = offer.payment_id.hex();
  j["vote_fee"] = offer.vote_fee.units();
  j["incentive"] = offer.incentive.units();
  j["consumer"] = to_hex(offer.consumer);
  j["producer"] = to_hex(offer.producer);
  j["marker"] = Address{kServiceMarkerVersion, offer.marker}.text();
  j["funding"] = to_json(offer.funding);
  j["draft"] = to_json(offer.draft);
  return j;
}

VoucherOffer offer_from_json(const Json& j) {
  if (!j.is_object() || j.value("type", "") != "voucher-offer") bad("not a voucher-offer document");
  VoucherOffer offer;
  offer.payment_id = TxId{hex_field<32>(j, "payment_txid")};
  offer.vote_fee = Amount(uint_field(j, "vote_fee"));
  offer.incentive = Amount(uint_field(j, "incentive"));
  offer.consumer = hex_field<20>(j, "consumer");
  offer.producer = hex_field<20>(j, "producer");
  offer.marker = base58check_decode(j.at("marker").get<std::string>()).payload;
  offer.funding = transaction_from_json(j.at("funding"));
  offer.draft = transaction_from_json(j.at("draft"));
  return offer;
}

Json tx_document(const std::vector<Transaction>& txs) {
  if (txs.size() == 1) return Json{{"type", "transaction"}, {"tx", to_json(txs.front())}};
  Json arr = Json::array();
  for (const Transaction& tx : txs) arr.push_back(to_json(tx));
  return Json{{"type", "bundle"}, {"transactions", std::move(arr)}};
}

std::vector<Transaction> txs_from_document(const Json& j) {
  const std::string type = j.is_object() ? j.value("type", "") : "";
  if (type == "transaction") return {transaction_from_json(j.at("tx"))};
  if (type == "bundle") {
    std::vector<Transaction> txs;
    for (const Json& t : array_field(j, "transactions")) txs.push_back(transaction_from_json(t));
    return txs;
  }
  bad("not a transaction document");
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    bad(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::io_error, "write failed for " + path.string());
}

}  // namespace vouch
