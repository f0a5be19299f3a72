#pragma once

// Seeded generator of mixed chains: plain transfers, service payments, offers
// that are co-signed or declined, vouchers funded from non-payment outputs,
// duplicate vouchers against one payment, zero-fee vouchers, and rejected
// double-spend attempts.

#include <cstdint>
#include <vector>

#include "vouch/chain.hpp"

namespace vouch::test_support {

struct RandomChainOptions {
  std::uint64_t seed = 1;
  std::size_t max_transactions = 1000;
  std::size_t blocks = 40;
  std::size_t agents = 8;
};

struct RandomChain {
  Chain chain;
  std::vector<KeyPair> keys;
  Amount genesis_total;
  std::size_t transactions = 0;
  std::size_t double_spend_attempts = 0;
  std::size_t double_spends_rejected = 0;
  std::size_t decoy_vouchers = 0;      // funded from non-payment outputs
  std::size_t duplicate_vouchers = 0;  // second voucher against a counted payment
};

RandomChain make_random_chain(const RandomChainOptions& options);

}  // namespace vouch::test_support
