#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vouch {

enum class Errc {
  // codec
  invalid_payload,
  malformed,
  checksum,
  invalid_service,
  // ledger
  missing_utxo,
  double_spend,
  bad_signature,
  missing_cosignature,
  value_overflow,
  wrong_key,
  coinbase_not_allowed,
  block_rejected,
  corrupt_chain,
  // protocol
  insufficient_funds,
  out1_already_spent,
  payment_not_found,
  incentive_too_large,
  invalid_rate,
  vote_fee_below_minimum,
  already_cosigned,
  illegal_transition,
  // reputation
  out_of_order_block,
  // general
  invalid_config,
  parse_error,
  io_error,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  explicit Error(Errc code) : std::runtime_error(std::string(to_string(code))), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace vouch
