#include "vouch/error.hpp"

namespace vouch {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_payload: return "invalid-payload";
    case Errc::malformed: return "malformed";
    case Errc::checksum: return "checksum";
    case Errc::invalid_service: return "invalid-service";
    case Errc::missing_utxo: return "missing-utxo";
    case Errc::double_spend: return "double-spend";
    case Errc::bad_signature: return "bad-signature";
    case Errc::missing_cosignature: return "missing-cosignature";
    case Errc::value_overflow: return "value-overflow";
    case Errc::wrong_key: return "wrong-key";
    case Errc::coinbase_not_allowed: return "coinbase-not-allowed";
    case Errc::block_rejected: return "block-rejected";
    case Errc::corrupt_chain: return "corrupt-chain";
    case Errc::insufficient_funds: return "insufficient-funds";
    case Errc::out1_already_spent: return "out1-already-spent";
    case Errc::payment_not_found: return "payment-not-found";
    case Errc::incentive_too_large: return "incentive-too-large";
    case Errc::invalid_rate: return "invalid-rate";
    case Errc::vote_fee_below_minimum: return "vote-fee-below-minimum";
    case Errc::already_cosigned: return "already-cosigned";
    case Errc::illegal_transition: return "illegal-transition";
    case Errc::out_of_order_block: return "out-of-order-block";
    case Errc::invalid_config: return "invalid-config";
    case Errc::parse_error: return "parse-error";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

}  // namespace vouch
