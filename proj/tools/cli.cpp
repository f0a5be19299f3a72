#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "vouch/protocol.hpp"
#include "vouch/report.hpp"
#include "vouch/reputation.hpp"
#include "vouch/sim.hpp"
#include "vouch/store.hpp"

namespace vouch::cli {

namespace fs = std::filesystem;

int exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::io_error:
      return kIoError;
    case Errc::parse_error:
    case Errc::malformed:
    case Errc::checksum:
    case Errc::invalid_payload:
    case Errc::invalid_service:
    case Errc::invalid_config:
    case Errc::invalid_rate:
      return kParseError;
    case Errc::insufficient_funds:
      return kInsufficientFunds;
    case Errc::out1_already_spent:
    case Errc::payment_not_found:
      return kLinkFailure;
    default:
      return kValidationError;
  }
}

namespace {

struct Paths {
  fs::path data_dir;
  fs::path chain;
  fs::path wallet;
  fs::path mempool;
  fs::path urls;
};

struct Options {
  std::string data_dir;
  std::string chain;
  std::string wallet;

  Paths resolve() const {
    Paths p;
    std::string dir = data_dir;
    if (dir.empty()) {
      const char* env = std::getenv("VOUCH_DATA_DIR");
      dir = env != nullptr && *env != '\0' ? env : ".vouch";
    }
    p.data_dir = dir;
    p.chain = chain.empty() ? p.data_dir / "chain.jsonl" : fs::path(chain);
    p.wallet = wallet.empty() ? p.data_dir / "wallet.json" : fs::path(wallet);
    p.mempool = p.data_dir / "mempool.jsonl";
    p.urls = p.data_dir / "urls.json";
    return p;
  }
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::io_error, "cannot create " + dir.string() + ": " + ec.message());
}

std::vector<Transaction> load_mempool(const fs::path& path) {
  std::vector<Transaction> txs;
  std::ifstream in(path);
  if (!in) return txs;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) txs.push_back(transaction_from_json(Json::parse(line)));
  }
  return txs;
}

void save_mempool(const fs::path& path, const std::vector<Transaction>& txs) {
  std::string text;
  for (const Transaction& tx : txs) text += to_json(tx).dump() + "\n";
  write_text_file(path, text);
}

UrlRegistry load_urls(const fs::path& path, std::vector<std::string>* list = nullptr) {
  UrlRegistry reg;
  if (!fs::exists(path)) return reg;
  const Json doc = read_json_file(path);
  for (const auto& u : doc.at("urls")) {
    reg.add(u.get<std::string>());
    if (list) list->push_back(u.get<std::string>());
  }
  return reg;
}

void remember_url(const fs::path& path, const std::string& url) {
  std::vector<std::string> urls;
  load_urls(path, &urls);
  if (std::find(urls.begin(), urls.end(), url) != urls.end()) return;
  urls.push_back(url);
  write_text_file(path, Json{{"urls", urls}}.dump(2) + "\n");
}

Wallet load_wallet_or_empty(const fs::path& path) { return fs::exists(path) ? load_wallet(path) : Wallet{}; }

KeyId parse_key_address(const std::string& text) {
  const Address a = base58check_decode(text);
  if (a.version != kKeyHashVersion) throw Error(Errc::malformed, "'" + text + "' is not a key-hash address");
  return a.payload;
}

/// Key name from the wallet, or a key-hash address.
KeyId resolve_key(const std::string& who, const Wallet& wallet) {
  if (const KeyPair* k = wallet.find(who)) return k->id();
  return parse_key_address(who);
}

ScoringMode parse_mode(const std::string& mode, const std::string& c) {
  if (mode == "unweighted") return ScoringMode::unweighted();
  if (mode == "weighted") return ScoringMode::weighted(parse_coins(c));
  throw Error(Errc::invalid_config, "unknown scoring mode '" + mode + "'");
}

void emit_document(const Json& doc, const std::string& out_path, std::ostream& out, Json& summary) {
  if (out_path.empty()) {
    summary["document"] = doc;
  } else {
    write_text_file(out_path, doc.dump(2) + "\n");
    summary["file"] = out_path;
  }
  out << summary.dump(2) << "\n";
}

void lock_mempool_spends(Wallet& wallet, const std::vector<Transaction>& mempool) {
  for (const Transaction& tx : mempool) {
    for (const TxIn& in : tx.inputs) wallet.lock(in.prevout);
  }
}

std::optional<TxId> mempool_spender(const std::vector<Transaction>& mempool, const OutPoint& op) {
  for (const Transaction& tx : mempool) {
    for (const TxIn& in : tx.inputs) {
      if (in.prevout == op) return txid(tx);
    }
  }
  return std::nullopt;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Voucher-based service reputation on a UTXO ledger", "vouch"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--data-dir", opt.data_dir, "Data directory (default $VOUCH_DATA_DIR or .vouch)");
  app.add_option("--chain", opt.chain, "Chain file path override");
  app.add_option("--wallet", opt.wallet, "Wallet file path override");

  std::function<void()> action;

  // keygen
  auto* keygen = app.add_subcommand("keygen", "Add a key to the wallet");
  std::string key_name, seed_hex;
  keygen->add_option("--name", key_name, "Key name");
  keygen->add_option("--seed", seed_hex, "32-byte hex seed (deterministic, for tests)");
  keygen->callback([&] {
    action = [&] {
      const Paths p = opt.resolve();
      ensure_dir(p.wallet.parent_path().empty() ? fs::path(".") : p.wallet.parent_path());
      Wallet w = load_wallet_or_empty(p.wallet);
      const Seed seed = seed_hex.empty() ? KeyPair::generate().seed() : array_from_hex<32>(seed_hex);
      const std::string name = key_name.empty() ? "key" + std::to_string(w.keys().size()) : key_name;
      const KeyPair& k = w.add(name, seed);
      save_wallet(w, p.wallet);
      out << Json{{"name", name}, {"address", k.address().text()}, {"key_id", to_hex(k.id())}}.dump(2) << "\n";
    };
  });

  // init
  auto* init = app.add_subcommand("init", "Create a chain with a genesis block");
  std::vector<std::string> allocs;
  std::string subsidy = "50";
  bool force = false;
  init->add_option("--alloc", allocs, "ADDRESS=COINS genesis allocation (repeatable)");
  init->add_option("--subsidy", subsidy, "Block subsidy in coins");
  init->add_flag("--force", force, "Overwrite an existing chain");
  init->callback([&] {
    action = [&] {
      const Paths p = opt.resolve();
      if (fs::exists(p.chain) && !force) throw Error(Errc::io_error, p.chain.string() + " exists (use --force)");
      ensure_dir(p.data_dir);
      const Wallet w = load_wallet_or_empty(p.wallet);
      ChainConfig cfg;
      cfg.subsidy = parse_coins(subsidy);
      for (const std::string& a : allocs) {
        const auto eq = a.find('=');
        if (eq == std::string::npos) throw Error(Errc::parse_error, "allocation '" + a + "' is not WHO=COINS");
        cfg.allocations.push_back({resolve_key(a.substr(0, eq), w), parse_coins(a.substr(eq + 1))});
      }
      const Chain chain = new_chain(cfg);
      save_chain(chain, p.chain);
      save_mempool(p.mempool, {});
      out << Json{{"height", 0}, {"digest", to_hex(chain.tip().digest())}, {"supply", chain.supply().units()}}.dump(2)
          << "\n";
    };
  });

  // address-for-service
  auto* afs = app.add_subcommand("address-for-service", "Derive the service marker address of a URL");
  std::string url;
  afs->add_option("url", url, "Service URL")->required();
  afs->callback([&] {
    action = [&] {
      const Address a = derive_service_address(url);
      out << Json{{"url", url}, {"address", a.text()}, {"payload", to_hex(a.payload)}}.dump(2) << "\n";
    };
  });

  // pay
  auto* pay = app.add_subcommand("pay", "Build a service-bound payment");
  std::string producer_arg, amount_arg, fee_arg = "0", out_path, key_arg;
  pay->add_option("producer", producer_arg, "Producer key-hash address")->required();
  pay->add_option("url", url, "Service URL")->required();
  pay->add_option("amount", amount_arg, "Price in coins")->required();
  pay->add_option("--fee", fee_arg, "Miner fee in coins");
  pay->add_option("--key", key_arg, "Paying key name (default: first wallet key)");
  pay->add_option("--out", out_path, "Write the transaction document here");
  pay->callback([&] {
    action = [&] {
      const Paths p = opt.resolve();
      const Chain chain = load_chain(p.chain);
      Wallet w = load_wallet(p.wallet);
      if (!key_arg.empty()) {
        const KeyPair* k = w.find(key_arg);
        if (k == nullptr) throw Error(Errc::wrong_key, "no key named '" + key_arg + "'");
        Wallet only;
        only.add(key_arg, k->seed());
        w = std::move(only);
      }
      lock_mempool_spends(w, load_mempool(p.mempool));
      const PaymentTx payment = build_payment(w, chain, parse_key_address(producer_arg),
                                              ServiceDescriptor::from_url(url), parse_coins(amount_arg),
                                              parse_coins(fee_arg));
      remember_url(p.urls, url);
      Json summary{{"txid", payment.id.hex()},
                   {"marker", Address{kServiceMarkerVersion, payment.marker}.text()},
                   {"out1", payment.tx.outputs[0].amount.units()},
                   {"out2", payment.tx.outputs[1].amount.units()},
                   {"out3", payment.tx.outputs[2].amount.units()}};
      emit_document(tx_document({payment.tx}), out_path, out, summary);
    };
  });

  // offer
  auto* offer_cmd = app.add_subcommand("offer", "Build a voucher offer for a confirmed payment");
  std::string payment_arg, rate_arg = "0.03", incentive_arg = "0";
  bool allow_zero = false;
  offer_cmd->add_option("payment", payment_arg, "Payment txid")->required();
  offer_cmd->add_option("--rate", rate_arg, "Vote-fee fraction of the price, e.g. 0.03");
  offer_cmd->add_option("--incentive", incentive_arg, "Incentive in coins");
  offer_cmd->add_option("--fee", fee_arg, "Funding transaction miner fee in coins");
  offer_cmd->add_flag("--allow-zero-fee", allow_zero, "Waive the minimum vote fee");
  offer_cmd->add_option("--out", out_path, "Write the offer document here");
  offer_cmd->callback([&] {
    action = [&] {
      const Paths p = opt.resolve();
      const Chain chain = load_chain(p.chain);
      const Wallet w = load_wallet(p.wallet);
      const TxId pid = TxId::from_hex(payment_arg);
      if (auto spender = mempool_spender(load_mempool(p.mempool), OutPoint{pid, PaymentTx::kPriceOutput})) {
        throw Error(Errc::out1_already_spent, "price output is spent by pending " + spender->hex());
      }
      ProtocolConfig cfg;
      cfg.enforce_minimum_fee = !allow_zero;
      const VoucherOffer offer = build_voucher_offer(pid, w, chain, Rate::parse(rate_arg),
                                                     parse_coins(incentive_arg), parse_coins(fee_arg), cfg);
      Json summary{{"payment_txid", offer.payment_id.hex()},
                   {"funding_txid", txid(offer.funding).hex()},
                   {"voucher_txid", txid(offer.draft).hex()},
                   {"vote_fee", offer.vote_fee.units()},
                   {"incentive", offer.incentive.units()},
                   {"escrow", offer.funding.outputs[0].amount.units()}};
      emit_document(to_json(offer), out_path, out, summary);
    };
  });

  // cosign
  auto* cosign = app.add_subcommand("cosign", "Co-sign a voucher offer as the consumer");
  std::string offer_path;
  cosign->add_option("offer", offer_path, "Offer document")->required();
  cosign->add_option("--out", out_path, "Write the funding + voucher bundle here");
  cosign->callback([&] {
    action = [&] {
      const Paths p = opt.resolve();
      const Chain chain = load_chain(p.chain);
      const Wallet w = load_wallet(p.wallet);
      const VoucherOffer offer = offer_from_json(read_json_file(offer_path));
      check_offer_link(offer, chain);
      const auto pending = mempool_spender(load_mempool(p.mempool), OutPoint{offer.payment_id, 0});
      if (pending && *pending != txid(offer.funding)) {
        throw Error(Errc::out1_already_spent, "price output is spent by pending " + pending->hex());
      }
      const KeyPair* consumer = w.find(offer.consumer);
      if (consumer == nullptr) throw Error(Errc::wrong_key, "wallet does not hold the offer's consumer key");
      const Transaction voucher = cosign_voucher(offer, *consumer);
      Json summary{{"funding_txid", txid(offer.funding).hex()},
                   {"voucher_txid", txid(voucher).hex()},
                   {"vote_fee", offer.vote_fee.units()}};
      emit_document(tx_document({offer.funding, voucher}), out_path, out, summary);
    };
  });

  // submit
  auto* submit = app.add_subcommand("submit", "Validate transactions and add them to the mempool");
  std::string tx_path;
  submit->add_option("file", tx_path, "Transaction or bundle document")->required();
  submit->callback([&] {
    action = [&] {
      const Paths p = opt.resolve();
      const Chain chain = load_chain(p.chain);
      std::vector<Transaction> mempool = load_mempool(p.mempool);
      const std::vector<Transaction> incoming = txs_from_document(read_json_file(tx_path));
      std::vector<Transaction> all = mempool;
      all.insert(all.end(), incoming.begin(), incoming.end());
      Chain trial = chain;
      trial.mine(all, KeyId{});
      save_mempool(p.mempool, all);
      Json ids = Json::array();
      for (const Transaction& tx : incoming) ids.push_back(txid(tx).hex());
      out << Json{{"accepted", ids}, {"mempool_size", all.size()}}.dump(2) << "\n";
    };
  });

  // mine
  auto* mine = app.add_subcommand("mine", "Mine the mempool into a new block");
  std::string miner_arg;
  mine->add_option("--miner", miner_arg, "Miner key name or address")->required();
  mine->callback([&] {
    action = [&] {
      const Paths p = opt.resolve();
      Chain chain = load_chain(p.chain);
      const std::vector<Transaction> mempool = load_mempool(p.mempool);
      const KeyId miner = resolve_key(miner_arg, load_wallet_or_empty(p.wallet));
      const Block& b = chain.mine(mempool, miner);
      append_tip(chain, p.chain);
      save_mempool(p.mempool, {});
      out << Json{{"height", b.height},
                  {"digest", to_hex(b.digest())},
                  {"transactions", b.transactions.size()},
                  {"fees", chain.block_fees(b.height).units()},
                  {"coinbase", b.coinbase.output_total().units()}}
                 .dump(2)
          << "\n";
    };
  });

  // rep
  auto* rep = app.add_subcommand("rep", "Query reputation");
  rep->require_subcommand(1);
  std::string mode_arg = "unweighted", c_arg = "0.01", target;
  for (auto* sub : {rep->add_subcommand("service", "Score of a service (URL or marker address)"),
                    rep->add_subcommand("producer", "Score of a producer with per-service breakdown")}) {
    sub->add_option("target", target, "URL, marker address, or producer address")->required();
    sub->add_option("--mode", mode_arg, "unweighted | weighted");
    sub->add_option("--c", c_arg, "Weighting constant in coins");
  }
  rep->get_subcommand("service")->callback([&] {
    action = [&] {
      const Paths p = opt.resolve();
      const Chain chain = load_chain(p.chain);
      const ReputationIndex index = full_rescan(chain, parse_mode(mode_arg, c_arg));
      const UrlRegistry urls = load_urls(p.urls);
      const bool is_address = validate_address(target).valid();
      const Hash160 marker = is_address ? base58check_decode(target).payload : derive_service_address(target).payload;
      const auto it = index.services().find(marker);
      const ServiceStats stats = it == index.services().end() ? ServiceStats{} : it->second;
      out << Json{{"service", is_address ? urls.lookup(marker) : target},
                  {"marker", Address{kServiceMarkerVersion, marker}.text()},
                  {"mode", mode_name(index.mode())},
                  {"score", stats.score.units()},
                  {"score_coins", format_coins(stats.score)},
                  {"events", stats.events},
                  {"last_height", stats.last_height}}
                 .dump(2)
          << "\n";
    };
  });
  rep->get_subcommand("producer")->callback([&] {
    action = [&] {
      const Paths p = opt.resolve();
      const Chain chain = load_chain(p.chain);
      const ReputationIndex index = full_rescan(chain, parse_mode(mode_arg, c_arg));
      Json j = producer_json(index, parse_key_address(target), load_urls(p.urls));
      j["mode"] = mode_name(index.mode());
      out << j.dump(2) << "\n";
    };
  });

  // rescan
  auto* rescan = app.add_subcommand("rescan", "Rebuild the reputation index from genesis and print a report");
  std::string format = "json";
  rescan->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  rescan->add_option("--mode", mode_arg, "unweighted | weighted");
  rescan->add_option("--c", c_arg, "Weighting constant in coins");
  rescan->callback([&] {
    action = [&] {
      const Paths p = opt.resolve();
      const Chain chain = load_chain(p.chain);
      const ReputationIndex index = full_rescan(chain, parse_mode(mode_arg, c_arg));
      const UrlRegistry urls = load_urls(p.urls);
      if (format == "csv") {
        out << report_csv(service_report(index, urls));
      } else {
        out << report_json(index, urls).dump(2) << "\n";
      }
    };
  });

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a scenario file");
  std::string scenario_path, out_dir;
  std::optional<std::uint64_t> seed;
  simulate->add_option("scenario", scenario_path, "Scenario document")->required();
  simulate->add_option("--seed", seed, "Override the scenario seed");
  simulate->add_option("--out-dir", out_dir, "Write chain, reports and metrics here");
  simulate->callback([&] {
    action = [&] {
      Scenario s = scenario_from_json(read_json_file(scenario_path));
      if (seed) s.seed = *seed;
      const SimResult r = vouch::run(s);
      Json ranking = Json::array();
      for (const auto& [name, score] : r.ranking) ranking.push_back(Json{{"name", name}, {"score", score.units()}});
      Json summary{{"seed", s.seed},
                   {"height", r.chain.height()},
                   {"tip", to_hex(r.chain.tip().digest())},
                   {"deals", r.deals.size()},
                   {"events", r.index.events().size()},
                   {"mode", mode_name(r.index.mode())},
                   {"ranking", std::move(ranking)}};
      if (!out_dir.empty()) {
        ensure_dir(out_dir);
        const fs::path dir(out_dir);
        save_chain(r.chain, dir / "chain.jsonl");
        write_text_file(dir / "report.json", report_json(r.index, r.urls).dump(2) + "\n");
        write_text_file(dir / "report.csv", report_csv(service_report(r.index, r.urls)));
        write_text_file(dir / "metrics.csv", metrics_csv(r));
        write_text_file(dir / "attack.csv", attack_report_csv(attack_report(r)));
        summary["out_dir"] = out_dir;
      }
      out << summary.dump(2) << "\n";
    };
  });

  // balance
  auto* balance = app.add_subcommand("balance", "Show spendable balance per wallet key");
  balance->callback([&] {
    action = [&] {
      const Paths p = opt.resolve();
      const Chain chain = load_chain(p.chain);
      const Wallet w = load_wallet(p.wallet);
      Json keys = Json::array();
      for (const NamedKey& k : w.keys()) {
        const Amount a = w.balance_of(k.key.id(), chain);
        keys.push_back(Json{{"name", k.name}, {"address", k.key.address().text()}, {"balance", a.units()},
                            {"balance_coins", format_coins(a)}});
      }
      out << Json{{"keys", keys}, {"total", w.balance(chain).units()}}.dump(2) << "\n";
    };
  });

  std::vector<const char*> argv{"vouch"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }

  try {
    if (action) action();
    return kOk;
  } catch (const BlockRejected& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    err << "error: parse-error: " << e.what() << "\n";
    return kParseError;
  }
}

}  // namespace vouch::cli
