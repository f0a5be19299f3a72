#include "vouch/sim.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace vouch {

namespace {

// Uniform double in [0, 1) from the top 53 bits; avoids library-specific
// distribution implementations so runs match across standard libraries.
double draw_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

bool draw_bernoulli(std::mt19937_64& rng, double p) { return draw_unit(rng) < p; }

std::size_t draw_index(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::invalid_config, what);
}

std::string_view policy_name(CosignPolicy p) { return p == CosignPolicy::always ? "always" : "if-satisfied"; }

CosignPolicy policy_from(std::string_view s) {
  if (s == "always") return CosignPolicy::always;
  if (s == "if-satisfied") return CosignPolicy::if_satisfied;
  throw Error(Errc::invalid_config, "unknown cosign policy '" + std::string(s) + "'");
}

Amount coins_field(const Json& j, const char* key, Amount fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (v.is_string()) return parse_coins(v.get<std::string>());
  throw Error(Errc::parse_error, std::string("'") + key + "' must be a decimal coin string");
}

struct Agent {
  std::string name;
  std::string role;
  std::string controller;
  Wallet wallet;
  KeyId key{};
};

struct OpenDeal {
  std::size_t producer;
  std::size_t consumer;
  double success;
  bool sybil;
  CosignPolicy policy;
  TxId payment;
  std::size_t record;
};

class Market {
 public:
  explicit Market(const Scenario& s) : s_(s), rng_(s.seed) {}

  SimResult run() {
    setup_agents();
    Chain chain = Chain::create(genesis_config());
    ReputationIndex index(s_.scoring);
    index.index_block(chain.tip(), chain);

    std::vector<std::size_t> rotation;
    for (const std::string& m : s_.miners) rotation.push_back(by_name_.at(m));
    if (s_.attacker && s_.attacker_mines) rotation.push_back(attacker_);

    for (std::uint64_t b = 1; b <= s_.blocks; ++b) {
      std::vector<Transaction> pending;
      settle(chain, pending);
      order(chain, pending, b);
      chain.mine(pending, agents_[rotation[(b - 1) % rotation.size()]].key);
      index.index_block(chain.tip(), chain);
      for (Agent& a : agents_) a.wallet.unlock_all();
    }

    UrlRegistry urls;
    for (const ProducerSpec& p : s_.producers) urls.add(p.url);
    if (s_.attacker) urls.add(s_.attacker->url);

    ReputationIndex unweighted =
        s_.scoring.is_weighted() ? full_rescan(chain, ScoringMode::unweighted()) : index;
    auto metrics = collect(chain, index, unweighted);
    auto ranking = rank(metrics);
    return SimResult{s_, std::move(chain), std::move(index), std::move(urls),
                     std::move(metrics), std::move(records_), std::move(ranking)};
  }

 private:
  std::size_t ensure_agent(const std::string& name, const std::string& role, const std::string& controller) {
    if (const auto it = by_name_.find(name); it != by_name_.end()) {
      Agent& a = agents_[it->second];
      if (a.role.find(role) == std::string::npos) a.role += "+" + role;
      return it->second;
    }
    Agent a{name, role, controller, Wallet{}, {}};
    a.key = a.wallet.add(name, seed_from_label("vouch-sim/" + name)).id();
    agents_.push_back(std::move(a));
    by_name_.emplace(name, agents_.size() - 1);
    return agents_.size() - 1;
  }

  void setup_agents() {
    for (const std::string& m : s_.miners) ensure_agent(m, "miner", m);
    for (const ProducerSpec& p : s_.producers) producers_.push_back(ensure_agent(p.name, "producer", p.name));
    for (const ConsumerSpec& c : s_.consumers) consumers_.push_back(ensure_agent(c.name, "consumer", c.name));
    if (s_.attacker) {
      const AttackerSpec& a = *s_.attacker;
      attacker_ = ensure_agent(a.name, "attacker", a.name);
      for (std::uint64_t i = 0; i < a.identities; ++i) {
        sybils_.push_back(ensure_agent(a.name + "#" + std::to_string(i + 1), "sybil", a.name));
      }
    }
  }

  ChainConfig genesis_config() const {
    ChainConfig config;
    config.subsidy = s_.subsidy;
    for (std::size_t i = 0; i < s_.producers.size(); ++i) {
      if (!s_.producers[i].funds.is_zero()) config.allocations.push_back({agents_[producers_[i]].key, s_.producers[i].funds});
    }
    for (std::size_t i = 0; i < s_.consumers.size(); ++i) {
      if (!s_.consumers[i].funds.is_zero()) config.allocations.push_back({agents_[consumers_[i]].key, s_.consumers[i].funds});
    }
    if (s_.attacker && !sybils_.empty()) {
      const std::uint64_t n = sybils_.size();
      const std::uint64_t share = s_.attacker->budget.units() / n;
      const std::uint64_t rest = s_.attacker->budget.units() % n;
      for (std::size_t i = 0; i < sybils_.size(); ++i) {
        const Amount a(share + (i == 0 ? rest : 0));
        if (!a.is_zero()) config.allocations.push_back({agents_[sybils_[i]].key, a});
      }
    }
    return config;
  }

  // Deliver, offer, and co-sign or decline every deal paid in the previous block.
  void settle(const Chain& chain, std::vector<Transaction>& pending) {
    for (const OpenDeal& d : open_) {
      DealRecord& rec = records_[d.record];
      rec.satisfied = d.sybil ? true : draw_bernoulli(rng_, d.success);
      rec.state = advance(rec.state, DealEvent::deliver);

      VoucherOffer offer;
      try {
        offer = build_voucher_offer(d.payment, agents_[d.producer].wallet, chain, s_.protocol.rate,
                                    s_.protocol.incentive, s_.protocol.funding_fee, s_.protocol.fees);
      } catch (const Error& e) {
        rec.failure = std::string(to_string(e.code()));
        continue;
      }
      rec.state = advance(rec.state, DealEvent::send_offer);

      bool cosign = false;
      if (d.sybil) {
        cosign = draw_bernoulli(rng_, s_.attacker->cosign_probability);
      } else {
        cosign = d.policy == CosignPolicy::always || rec.satisfied;
      }
      if (!cosign) {
        rec.state = advance(rec.state, DealEvent::decline);
        continue;
      }
      Transaction voucher = cosign_voucher(offer, agents_[d.consumer].wallet.primary());
      rec.funding = txid(offer.funding);
      rec.voucher = txid(voucher);
      pending.push_back(std::move(offer.funding));
      pending.push_back(std::move(voucher));
      rec.state = advance(rec.state, DealEvent::cosign);
    }
    open_.clear();
  }

  bool place(const Chain& chain, std::vector<Transaction>& pending, std::size_t consumer, std::size_t producer,
             const std::string& url, Amount price, double success, bool sybil, CosignPolicy policy,
             std::uint64_t height) {
    PaymentTx payment;
    try {
      payment = build_payment(agents_[consumer].wallet, chain, agents_[producer].key,
                              ServiceDescriptor::from_url(url), price, s_.protocol.payment_fee);
    } catch (const Error& e) {
      if (e.code() == Errc::insufficient_funds) return false;
      throw;
    }
    DealRecord rec;
    rec.producer = agents_[producer].name;
    rec.consumer = agents_[consumer].name;
    rec.paid_height = height;
    rec.state = advance(kInitialDealState, DealEvent::pay);
    rec.payment = payment.id;
    records_.push_back(std::move(rec));
    open_.push_back(OpenDeal{producer, consumer, success, sybil, policy, payment.id, records_.size() - 1});
    pending.push_back(std::move(payment.tx));
    return true;
  }

  void order(const Chain& chain, std::vector<Transaction>& pending, std::uint64_t height) {
    for (std::size_t i = 0; i < s_.consumers.size(); ++i) {
      const ConsumerSpec& c = s_.consumers[i];
      if (!draw_bernoulli(rng_, c.purchase_rate)) continue;

      std::size_t pick = 0;
      if (c.producer) {
        pick = static_cast<std::size_t>(
            std::find_if(s_.producers.begin(), s_.producers.end(),
                         [&](const ProducerSpec& p) { return p.name == *c.producer; }) -
            s_.producers.begin());
      } else {
        std::vector<std::size_t> choices;
        for (std::size_t p = 0; p < s_.producers.size(); ++p) {
          if (producers_[p] != consumers_[i]) choices.push_back(p);
        }
        if (choices.empty()) continue;
        pick = choices[draw_index(rng_, choices.size())];
      }
      const ProducerSpec& p = s_.producers[pick];
      place(chain, pending, consumers_[i], producers_[pick], p.url, p.price, p.success, false, c.policy, height);
    }

    if (!s_.attacker) return;
    const AttackerSpec& a = *s_.attacker;
    for (std::uint64_t d = 0; d < a.deals_per_block; ++d) {
      for (std::size_t tries = 0; tries < sybils_.size(); ++tries) {
        const std::size_t who = sybils_[sybil_cursor_++ % sybils_.size()];
        if (place(chain, pending, who, attacker_, a.url, a.price, 1.0, true, CosignPolicy::always, height)) break;
      }
    }
  }

  std::vector<AgentMetrics> collect(const Chain& chain, const ReputationIndex& index,
                                    const ReputationIndex& unweighted) const {
    std::vector<AgentMetrics> out;
    std::map<KeyId, std::size_t> by_key;
    for (const Agent& a : agents_) {
      AgentMetrics m;
      m.name = a.name;
      m.role = a.role;
      m.controller = a.controller;
      m.key = a.key;
      m.reputation = index.producer_score(a.key);
      m.reputation_unweighted = unweighted.producer_score(a.key);
      by_key.emplace(a.key, out.size());
      out.push_back(std::move(m));
    }

    for (const DealRecord& d : records_) {
      AgentMetrics& consumer = out[by_name_.at(d.consumer)];
      AgentMetrics& producer = out[by_name_.at(d.producer)];
      consumer.payments_made += 1;
      producer.sales += 1;
      consumer.miner_fees_paid += chain.fee_of(d.payment).value();
      if (d.state == DealState::declined) consumer.offers_declined += 1;
      if (!d.voucher) continue;

      consumer.vouchers_cosigned += 1;
      producer.vouchers_received += 1;
      producer.vote_fees_paid += chain.fee_of(*d.voucher).value();
      producer.miner_fees_paid += chain.fee_of(*d.funding).value();
      const Transaction* voucher = chain.find(*d.voucher);
      for (const TxOut& o : voucher->outputs) {
        const auto* p2kh = std::get_if<PayToKeyHash>(&o.lock);
        if (p2kh != nullptr && p2kh->key == consumer.key) {
          consumer.incentives_received += o.amount;
          producer.incentives_paid += o.amount;
        }
      }
    }

    for (const Block& b : chain.blocks()) {
      if (b.height == 0) continue;
      const auto* p2kh = std::get_if<PayToKeyHash>(&b.coinbase.outputs.front().lock);
      if (p2kh == nullptr) continue;
      if (const auto it = by_key.find(p2kh->key); it != by_key.end()) {
        out[it->second].fees_collected += chain.block_fees(b.height);
      }
    }
    return out;
  }

  std::vector<std::pair<std::string, Amount>> rank(const std::vector<AgentMetrics>& metrics) const {
    std::vector<std::pair<std::string, Amount>> ranking;
    for (std::size_t p : producers_) ranking.emplace_back(metrics[p].name, metrics[p].reputation);
    if (s_.attacker) ranking.emplace_back(metrics[attacker_].name, metrics[attacker_].reputation);
    std::stable_sort(ranking.begin(), ranking.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    return ranking;
  }

  const Scenario& s_;
  std::mt19937_64 rng_;
  std::vector<Agent> agents_;
  std::map<std::string, std::size_t> by_name_;
  std::vector<std::size_t> producers_;
  std::vector<std::size_t> consumers_;
  std::vector<std::size_t> sybils_;
  std::size_t attacker_ = 0;
  std::size_t sybil_cursor_ = 0;
  std::vector<OpenDeal> open_;
  std::vector<DealRecord> records_;
};

}  // namespace

void Scenario::validate() const {
  require(!miners.empty() || (attacker && attacker_mines), "scenario needs at least one miner");
  require(protocol.rate.in_unit_interval(), "rate must lie in (0, 1]");
  std::set<std::string> names;
  for (const ProducerSpec& p : producers) {
    require(!p.name.empty(), "producer without a name");
    require(names.insert(p.name).second, "duplicate producer '" + p.name + "'");
    require(!p.url.empty(), "producer '" + p.name + "' has no service url");
    require(is_probability(p.success), "producer '" + p.name + "' success must lie in [0, 1]");
  }
  std::set<std::string> consumer_names;
  for (const ConsumerSpec& c : consumers) {
    require(!c.name.empty(), "consumer without a name");
    require(consumer_names.insert(c.name).second, "duplicate consumer '" + c.name + "'");
    require(is_probability(c.purchase_rate), "consumer '" + c.name + "' purchase_rate must lie in [0, 1]");
    if (c.producer) require(names.contains(*c.producer), "consumer '" + c.name + "' prefers an unknown producer");
  }
  if (attacker) {
    require(!attacker->name.empty() && !attacker->url.empty(), "attacker needs a name and url");
    require(!names.contains(attacker->name) && !consumer_names.contains(attacker->name),
            "attacker name collides with another agent");
    require(attacker->identities >= 1, "attacker needs at least one identity");
    require(is_probability(attacker->cosign_probability), "attacker cosign_probability must lie in [0, 1]");
  }
}

const AgentMetrics* SimResult::agent(std::string_view name) const {
  const auto it = std::find_if(agents.begin(), agents.end(), [&](const AgentMetrics& a) { return a.name == name; });
  return it == agents.end() ? nullptr : &*it;
}

SimResult run(const Scenario& scenario) {
  scenario.validate();
  return Market(scenario).run();
}

Scenario scenario_from_json(const Json& j) {
  try {
    Scenario s;
    s.seed = j.value("seed", s.seed);
    s.blocks = j.value("blocks", s.blocks);
    s.subsidy = coins_field(j, "subsidy", s.subsidy);
    if (j.contains("miners")) s.miners = j.at("miners").get<std::vector<std::string>>();
    s.attacker_mines = j.value("attacker_mines", false);

    if (j.contains("protocol")) {
      const Json& p = j.at("protocol");
      if (p.contains("rate")) s.protocol.rate = Rate::parse(p.at("rate").get<std::string>());
      s.protocol.incentive = coins_field(p, "incentive", s.protocol.incentive);
      s.protocol.payment_fee = coins_field(p, "payment_fee", s.protocol.payment_fee);
      s.protocol.funding_fee = coins_field(p, "funding_fee", s.protocol.funding_fee);
      s.protocol.fees.minimum_vote_fee = coins_field(p, "minimum_vote_fee", s.protocol.fees.minimum_vote_fee);
      s.protocol.fees.enforce_minimum_fee = p.value("enforce_minimum_fee", true);
    }
    if (j.contains("scoring")) {
      const Json& sc = j.at("scoring");
      const std::string mode = sc.value("mode", "unweighted");
      if (mode == "weighted") {
        s.scoring = ScoringMode::weighted(coins_field(sc, "c", Amount{}));
      } else if (mode != "unweighted") {
        throw Error(Errc::invalid_config, "unknown scoring mode '" + mode + "'");
      }
    }
    for (const Json& p : j.value("producers", Json::array())) {
      ProducerSpec spec;
      spec.name = p.at("name").get<std::string>();
      spec.url = p.at("url").get<std::string>();
      spec.price = coins_field(p, "price", spec.price);
      spec.success = p.value("success", 1.0);
      spec.funds = coins_field(p, "funds", spec.funds);
      s.producers.push_back(std::move(spec));
    }
    for (const Json& c : j.value("consumers", Json::array())) {
      ConsumerSpec spec;
      spec.name = c.at("name").get<std::string>();
      spec.funds = coins_field(c, "funds", spec.funds);
      spec.purchase_rate = c.value("purchase_rate", spec.purchase_rate);
      spec.policy = policy_from(c.value("policy", "if-satisfied"));
      if (c.contains("producer")) spec.producer = c.at("producer").get<std::string>();
      s.consumers.push_back(std::move(spec));
    }
    if (j.contains("attacker")) {
      const Json& a = j.at("attacker");
      AttackerSpec spec;
      spec.name = a.value("name", spec.name);
      spec.url = a.at("url").get<std::string>();
      spec.price = coins_field(a, "price", spec.price);
      spec.identities = a.value("identities", spec.identities);
      spec.budget = coins_field(a, "budget", spec.budget);
      spec.cosign_probability = a.value("cosign_probability", spec.cosign_probability);
      spec.deals_per_block = a.value("deals_per_block", spec.deals_per_block);
      s.attacker = std::move(spec);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("scenario: ") + e.what());
  }
}

Json to_json(const Scenario& s) {
  Json j;
  j["seed"] = s.seed;
  j["blocks"] = s.blocks;
  j["subsidy"] = format_coins(s.subsidy);
  j["miners"] = s.miners;
  j["attacker_mines"] = s.attacker_mines;
  j["protocol"] = Json{{"rate", s.protocol.rate.text()},
                       {"incentive", format_coins(s.protocol.incentive)},
                       {"payment_fee", format_coins(s.protocol.payment_fee)},
                       {"funding_fee", format_coins(s.protocol.funding_fee)},
                       {"minimum_vote_fee", format_coins(s.protocol.fees.minimum_vote_fee)},
                       {"enforce_minimum_fee", s.protocol.fees.enforce_minimum_fee}};
  Json scoring{{"mode", mode_name(s.scoring)}};
  if (s.scoring.is_weighted()) scoring["c"] = format_coins(s.scoring.constant());
  j["scoring"] = std::move(scoring);
  Json producers = Json::array();
  for (const ProducerSpec& p : s.producers) {
    producers.push_back(Json{{"name", p.name},
                             {"url", p.url},
                             {"price", format_coins(p.price)},
                             {"success", p.success},
                             {"funds", format_coins(p.funds)}});
  }
  j["producers"] = std::move(producers);
  Json consumers = Json::array();
  for (const ConsumerSpec& c : s.consumers) {
    Json jc{{"name", c.name},
            {"funds", format_coins(c.funds)},
            {"purchase_rate", c.purchase_rate},
            {"policy", policy_name(c.policy)}};
    if (c.producer) jc["producer"] = *c.producer;
    consumers.push_back(std::move(jc));
  }
  j["consumers"] = std::move(consumers);
  if (s.attacker) {
    const AttackerSpec& a = *s.attacker;
    j["attacker"] = Json{{"name", a.name},
                         {"url", a.url},
                         {"price", format_coins(a.price)},
                         {"identities", a.identities},
                         {"budget", format_coins(a.budget)},
                         {"cosign_probability", a.cosign_probability},
                         {"deals_per_block", a.deals_per_block}};
  }
  return j;
}

std::vector<AttackRow> attack_report(const SimResult& result) {
  std::map<KeyId, std::string> controller_of;
  for (const AgentMetrics& a : result.agents) controller_of.emplace(a.key, a.controller);

  std::map<KeyId, std::uint64_t> self_funded;
  std::map<KeyId, std::uint64_t> total;
  for (const ReputationEvent& e : result.index.events()) {
    total[e.producer] += e.vote_fee.units();
    const auto p = controller_of.find(e.producer);
    const auto v = controller_of.find(e.voter);
    if (p != controller_of.end() && v != controller_of.end() && p->second == v->second) {
      self_funded[e.producer] += e.vote_fee.units();
    }
  }

  std::vector<AttackRow> rows;
  for (const AgentMetrics& a : result.agents) {
    AttackRow r;
    r.name = a.name;
    r.role = a.role;
    r.reputation = a.reputation;
    r.vote_fees_paid = a.vote_fees_paid;
    r.fees_burned = a.vote_fees_paid + a.miner_fees_paid;
    r.incentives_net = static_cast<std::int64_t>(a.incentives_received.units()) -
                       static_cast<std::int64_t>(a.incentives_paid.units());
    if (const auto t = total.find(a.key); t != total.end() && t->second > 0) {
      r.self_financed_share = static_cast<double>(self_funded[a.key]) / static_cast<double>(t->second);
    }
    r.self_financed = r.self_financed_share > 0.5;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string attack_report_csv(const std::vector<AttackRow>& rows) {
  std::ostringstream out;
  out << "agent,role,reputation,fees_burned,vote_fees_paid,incentives_net,self_financed_share,self_financed\n";
  for (const AttackRow& r : rows) {
    char share[32];
    std::snprintf(share, sizeof share, "%.4f", r.self_financed_share);
    out << r.name << ',' << r.role << ',' << r.reputation.units() << ',' << r.fees_burned.units() << ','
        << r.vote_fees_paid.units() << ',' << r.incentives_net << ',' << share << ','
        << (r.self_financed ? "yes" : "no") << '\n';
  }
  return out.str();
}

std::string metrics_csv(const SimResult& result) {
  std::ostringstream out;
  out << "agent,role,controller,address,payments_made,vouchers_cosigned,offers_declined,sales,vouchers_received,"
         "vote_fees_paid,miner_fees_paid,incentives_paid,incentives_received,fees_collected,reputation,"
         "reputation_unweighted\n";
  for (const AgentMetrics& a : result.agents) {
    out << a.name << ',' << a.role << ',' << a.controller << ',' << Address{kKeyHashVersion, a.key}.text() << ','
        << a.payments_made << ',' << a.vouchers_cosigned << ',' << a.offers_declined << ',' << a.sales << ','
        << a.vouchers_received << ',' << a.vote_fees_paid.units() << ',' << a.miner_fees_paid.units() << ','
        << a.incentives_paid.units() << ',' << a.incentives_received.units() << ',' << a.fees_collected.units()
        << ',' << a.reputation.units() << ',' << a.reputation_unweighted.units() << '\n';
  }
  return out.str();
}

}  // namespace vouch
