#include <gtest/gtest.h>

#include "support/expect.hpp"
#include "support/random_chain.hpp"
#include "vouch/protocol.hpp"
#include "vouch/report.hpp"
#include "vouch/reputation.hpp"

using namespace vouch;

namespace {

KeyPair key(const std::string& label) { return KeyPair::from_seed(seed_from_label(label)); }

const std::string kFoo = "http://foo.bar";
const std::string kBaz = "http://foo.baz";

// Agents that each hold several genesis outputs so several deals can be
// in flight within one block.
class Market : public ::testing::Test {
 protected:
  Market() : chain(Chain::create(config())) {
    for (const char* name : {"alice", "bob", "carol"}) wallets[name].add(name, seed_from_label(name));
  }

  static ChainConfig config() {
    ChainConfig c;
    for (const char* name : {"alice", "bob", "carol"}) {
      for (int i = 0; i < 4; ++i) c.allocations.push_back({key(name).id(), Amount::coins(1)});
    }
    return c;
  }

  const KeyPair& k(const std::string& name) { return wallets.at(name).primary(); }

  PaymentTx pay(const std::string& buyer, const std::string& seller, const std::string& url,
                Amount price = Amount(10'000'000)) {
    PaymentTx p =
        build_payment(wallets.at(buyer), chain, k(seller).id(), ServiceDescriptor::from_url(url), price, Amount{});
    mine({p.tx});
    return p;
  }

  VoucherOffer offer(const PaymentTx& p, const std::string& seller, Rate rate = Rate::percent(3),
                     Amount incentive = Amount(1'000'000)) {
    return build_voucher_offer(p.id, wallets.at(seller), chain, rate, incentive, Amount{});
  }

  // Buyer pays, seller offers, buyer co-signs; two blocks.
  TxId deal(const std::string& buyer, const std::string& seller, const std::string& url) {
    const PaymentTx p = pay(buyer, seller, url);
    const VoucherOffer o = offer(p, seller);
    const Transaction v = cosign_voucher(o, k(buyer));
    mine({o.funding, v});
    return txid(v);
  }

  void mine(std::vector<Transaction> txs) {
    chain.mine(txs, key("miner").id());
    for (auto& [name, w] : wallets) w.unlock_all();
  }

  ReputationIndex unweighted() const { return index_chain(chain, ScoringMode::unweighted()); }

  Chain chain;
  std::map<std::string, Wallet> wallets;
};

}  // namespace

TEST_F(Market, ThreeTransactionDealScoresVoteFee) {
  deal("bob", "alice", kFoo);
  const ReputationIndex index = unweighted();
  EXPECT_EQ(index.service_score(kFoo).units(), 300'000u);
  EXPECT_EQ(index.producer_score(k("alice").id()).units(), 300'000u);
  ASSERT_EQ(index.events().size(), 1u);
  const ReputationEvent& e = index.events()[0];
  EXPECT_EQ(e.voter, k("bob").id());
  EXPECT_EQ(e.producer, k("alice").id());
  EXPECT_EQ(e.vote_fee.units(), 300'000u);
  EXPECT_EQ(e.height, 2u);
  EXPECT_EQ(index, full_rescan(chain, ScoringMode::unweighted()));
}

TEST_F(Market, PaymentFundingAndVoucherInOneBlock) {
  PaymentTx p = build_payment(wallets.at("bob"), chain, k("alice").id(), ServiceDescriptor::from_url(kFoo),
                              Amount(10'000'000), Amount{});
  Chain preview = chain;
  const std::vector<Transaction> just_payment{p.tx};
  preview.mine(just_payment, key("miner").id());
  const VoucherOffer o = build_voucher_offer(p.id, wallets.at("alice"), preview, Rate::percent(3), Amount(1'000'000),
                                             Amount{});
  mine({p.tx, o.funding, cosign_voucher(o, k("bob"))});
  EXPECT_EQ(chain.height(), 1u);
  EXPECT_EQ(unweighted().service_score(kFoo).units(), 300'000u);
  EXPECT_EQ(full_rescan(chain, ScoringMode::unweighted()).service_score(kFoo).units(), 300'000u);
}

TEST_F(Market, DeclinedOfferLeavesScoreAtZero) {
  const PaymentTx p = pay("bob", "alice", kFoo);
  offer(p, "alice");
  mine({});
  const ReputationIndex index = unweighted();
  EXPECT_EQ(index.service_score(kFoo).units(), 0u);
  EXPECT_TRUE(index.events().empty());
}

TEST_F(Market, UnknownServiceAndProducerAreZero) {
  deal("bob", "alice", kFoo);
  const ReputationIndex index = unweighted();
  EXPECT_EQ(index.service_score("http://never.voted").units(), 0u);
  const ProducerReputation nobody = index.producer(key("nobody").id());
  EXPECT_EQ(nobody.total.units(), 0u);
  EXPECT_TRUE(nobody.breakdown.empty());
}

TEST_F(Market, ScoresAddUpOverDeals) {
  for (int i = 0; i < 3; ++i) deal("bob", "alice", kFoo);
  EXPECT_EQ(unweighted().service_score(kFoo).units(), 3u * 300'000u);
}

TEST_F(Market, ProducerBreakdownShowsUnvotedService) {
  deal("bob", "alice", kFoo);
  pay("carol", "alice", kBaz);
  const ReputationIndex index = unweighted();
  const ProducerReputation rep = index.producer(k("alice").id());
  EXPECT_EQ(rep.total.units(), 300'000u);
  ASSERT_EQ(rep.breakdown.size(), 2u);
  Amount sum;
  for (const auto& [service, score] : rep.breakdown) {
    sum += score;
    if (service == derive_service_address(kBaz).payload) EXPECT_TRUE(score.is_zero());
  }
  EXPECT_EQ(sum, rep.total);
  EXPECT_EQ(index, full_rescan(chain, ScoringMode::unweighted()));
}

TEST_F(Market, VoucherFromNonPaymentOutputIgnored) {
  Wallet& bw = wallets.at("bob");
  const auto coins = select_coins(bw, k("bob").id(), chain, Amount(1));
  Transaction funding;
  funding.inputs.push_back(TxIn{coins[0].outpoint, {}});
  funding.outputs.push_back(TxOut{Amount(400'000), PayToMultisig2of2{k("bob").id(), k("alice").id()}});
  funding.outputs.push_back(TxOut{coins[0].output.amount - Amount(400'000), PayToKeyHash{k("bob").id()}});
  sign_input(funding, 0, k("bob"), coins[0].output);
  Transaction voucher;
  voucher.inputs.push_back(TxIn{OutPoint{txid(funding), 0}, {}});
  voucher.outputs.push_back(TxOut{Amount(100'000), PayToKeyHash{k("bob").id()}});
  voucher.outputs.push_back(TxOut{Amount{}, Marker{derive_service_address(kFoo).payload}});
  sign_input(voucher, 0, k("bob"), funding.outputs[0]);
  sign_input(voucher, 0, k("alice"), funding.outputs[0]);
  mine({funding, voucher});
  EXPECT_EQ(chain.fee_of(txid(voucher))->units(), 300'000u);
  EXPECT_TRUE(unweighted().events().empty());
  EXPECT_TRUE(full_rescan(chain, ScoringMode::unweighted()).events().empty());
}

TEST_F(Market, VoucherWithWrongMarkerIgnored) {
  const PaymentTx p = pay("bob", "alice", kFoo);
  const VoucherOffer o = offer(p, "alice");
  Transaction v = o.draft;
  v.inputs[0].signatures.clear();
  v.outputs.back().lock = Marker{derive_service_address(kBaz).payload};
  sign_input(v, 0, k("alice"), o.funding.outputs[0]);
  sign_input(v, 0, k("bob"), o.funding.outputs[0]);
  mine({o.funding, v});
  EXPECT_TRUE(unweighted().events().empty());
  EXPECT_TRUE(full_rescan(chain, ScoringMode::unweighted()).events().empty());
}

TEST_F(Market, OnlyFirstVoucherPerPaymentCounts) {
  const PaymentTx p = pay("bob", "alice", kFoo);
  Transaction funding;
  funding.inputs.push_back(TxIn{OutPoint{p.id, 0}, {}});
  for (int i = 0; i < 2; ++i) {
    funding.outputs.push_back(TxOut{Amount(300'000), PayToMultisig2of2{k("bob").id(), k("alice").id()}});
  }
  sign_input(funding, 0, k("alice"), chain);
  std::vector<Transaction> vouchers;
  for (std::uint32_t i = 0; i < 2; ++i) {
    Transaction v;
    v.inputs.push_back(TxIn{OutPoint{txid(funding), i}, {}});
    v.outputs.push_back(TxOut{Amount{}, Marker{p.marker}});
    sign_input(v, 0, k("alice"), funding.outputs[i]);
    sign_input(v, 0, k("bob"), funding.outputs[i]);
    vouchers.push_back(v);
  }
  mine({funding, vouchers[0]});
  mine({vouchers[1]});
  const ReputationIndex index = unweighted();
  ASSERT_EQ(index.events().size(), 1u);
  EXPECT_EQ(index.events()[0].voucher, txid(vouchers[0]));
  EXPECT_EQ(index.service_score(kFoo).units(), 300'000u);
  EXPECT_EQ(index, full_rescan(chain, ScoringMode::unweighted()));
}

TEST_F(Market, ZeroFeeVoucherNotCounted) {
  const PaymentTx p = pay("bob", "alice", kFoo, Amount(20));
  ProtocolConfig waived;
  waived.enforce_minimum_fee = false;
  const VoucherOffer o = build_voucher_offer(p.id, wallets.at("alice"), chain, Rate::percent(3), Amount{}, Amount{},
                                             waived);
  mine({o.funding, cosign_voucher(o, k("bob"))});
  EXPECT_TRUE(unweighted().events().empty());
}

TEST_F(Market, OutOfOrderBlockRejected) {
  deal("bob", "alice", kFoo);
  ReputationIndex index;
  EXPECT_ERRC(index.index_block(chain.blocks()[1], chain), Errc::out_of_order_block);
  index.index_block(chain.blocks()[0], chain);
  index.index_block(chain.blocks()[1], chain);
  EXPECT_ERRC(index.index_block(chain.blocks()[1], chain), Errc::out_of_order_block);
  EXPECT_EQ(index.indexed_through(), 1u);
}

TEST_F(Market, WeightedNewcomerContributesNothing) {
  deal("bob", "alice", kFoo);
  const ReputationIndex index = index_chain(chain, ScoringMode::weighted(Amount(300'000)));
  ASSERT_EQ(index.events().size(), 1u);
  EXPECT_EQ(index.events()[0].vote_fee.units(), 300'000u);
  EXPECT_EQ(index.events()[0].contribution.units(), 0u);
  EXPECT_EQ(index.service_score(kFoo).units(), 0u);
  EXPECT_EQ(index.unweighted_producer_score(k("alice").id()).units(), 300'000u);
}

TEST_F(Market, WeightedVoterWithReputation) {
  deal("bob", "alice", kFoo);    // alice now has raw score 300,000
  deal("alice", "carol", kBaz);  // alice votes for carol with r = c
  const ScoringMode mode = ScoringMode::weighted(Amount(300'000));
  const ReputationIndex index = index_chain(chain, mode);
  EXPECT_EQ(index.service_score(kBaz).units(), 150'000u);
  EXPECT_EQ(index.voter_score(k("alice").id()).units(), 0u);
  EXPECT_EQ(index, full_rescan(chain, mode));
}

TEST_F(Market, WeightUsesScoreBeforeTheBlock) {
  // alice earns her first vote and casts one in the same block.
  const PaymentTx to_alice = pay("bob", "alice", kFoo);
  const PaymentTx from_alice = pay("alice", "carol", kBaz);
  const VoucherOffer o1 = offer(to_alice, "alice");
  const VoucherOffer o2 = offer(from_alice, "carol");
  mine({o1.funding, cosign_voucher(o1, k("bob")), o2.funding, cosign_voucher(o2, k("alice"))});
  const ScoringMode mode = ScoringMode::weighted(Amount(1));
  const ReputationIndex index = index_chain(chain, mode);
  EXPECT_EQ(index.service_score(kBaz).units(), 0u);
  EXPECT_EQ(index, full_rescan(chain, mode));
}

TEST_F(Market, UnweightedScoreMatchesLedgerFees) {
  std::vector<TxId> vouchers;
  for (int i = 0; i < 2; ++i) vouchers.push_back(deal("bob", "alice", kFoo));
  vouchers.push_back(deal("carol", "alice", kFoo));
  Amount fees;
  for (const TxId& v : vouchers) fees += *chain.fee_of(v);
  EXPECT_EQ(unweighted().service_score(kFoo), fees);
}

TEST(Weight, ClosedForms) {
  EXPECT_EQ(weight(Amount{}, Amount(10)), 0.0);
  EXPECT_EQ(weight(Amount(10), Amount(10)), 0.5);
  EXPECT_LT(weight(Amount(5), Amount(10)), weight(Amount(6), Amount(10)));
  EXPECT_LT(weight(Amount(1'000'000'000'000), Amount(1)), 1.0);
  EXPECT_ERRC(weight(Amount(1), Amount{}), Errc::invalid_config);
  EXPECT_ERRC(ScoringMode::weighted(Amount{}), Errc::invalid_config);
}

TEST(Weight, ContributionFloors) {
  EXPECT_EQ(weighted_contribution(Amount{}, Amount(10), Amount(300'000)).units(), 0u);
  EXPECT_EQ(weighted_contribution(Amount(10), Amount(10), Amount(300'001)).units(), 150'000u);
  EXPECT_EQ(weighted_contribution(Amount(1), Amount(2), Amount(10)).units(), 3u);
  const Amount big(~std::uint64_t{0});
  EXPECT_LT(weighted_contribution(big, Amount(1), big), big);
}

TEST(Rescan, EmptyChain) {
  const Chain chain = Chain::create(ChainConfig{});
  const ReputationIndex index = full_rescan(chain, ScoringMode::unweighted());
  EXPECT_TRUE(index.events().empty());
  EXPECT_TRUE(index.services().empty());
  EXPECT_EQ(index.indexed_through(), 0u);
  EXPECT_EQ(index, index_chain(chain, ScoringMode::unweighted()));
}

TEST_F(Market, ReportForms) {
  deal("bob", "alice", kFoo);
  UrlRegistry urls;
  urls.add(kFoo);
  const ReputationIndex index = unweighted();
  EXPECT_EQ(report_csv(service_report(index, urls)),
            "marker,url,score,score_coins,events,last_height\n"
            "148TGVNRVSvgCQsfqfzdfv5nG8uzjCd4PP,http://foo.bar,300000,0.00300000,1,2\n");
  const Json j = report_json(index, urls);
  EXPECT_EQ(j.at("mode"), "unweighted");
  EXPECT_EQ(j.at("services").at(0).at("score"), 300'000u);
  EXPECT_EQ(j.at("producers").at(0).at("producer"), k("alice").address().text());
}

// Incremental indexing against the batch rescan on every prefix of seeded
// random chains, in both scoring modes.
class RandomChains : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(RandomChains, IncrementalEqualsRescanAtEveryHeight) {
  const auto rc = test_support::make_random_chain({.seed = GetParam(), .max_transactions = 300, .blocks = 15});
  const Chain& chain = rc.chain;
  for (const ScoringMode mode : {ScoringMode::unweighted(), ScoringMode::weighted(Amount(250'000))}) {
    Chain prefix = Chain::from_genesis(chain.blocks()[0], chain.subsidy());
    ReputationIndex incremental(mode);
    incremental.index_block(chain.blocks()[0], prefix);
    Amount last_total;
    for (std::size_t h = 1; h < chain.blocks().size(); ++h) {
      prefix.append(chain.blocks()[h]);
      incremental.index_block(chain.blocks()[h], prefix);
      ASSERT_EQ(incremental, full_rescan(prefix, mode)) << "height " << h;
      Amount total;
      for (const auto& [marker, stats] : incremental.services()) total += stats.score;
      EXPECT_GE(total, last_total);
      last_total = total;
    }
    std::set<TxId> payments;
    for (const ReputationEvent& e : incremental.events()) {
      EXPECT_TRUE(payments.insert(e.payment).second);
      EXPECT_GT(e.vote_fee.units(), 0u);
      EXPECT_EQ(chain.fee_of(e.voucher), e.vote_fee);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomChains, ::testing::Range<std::uint64_t>(1, 11));
