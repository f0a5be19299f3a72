#pragma once

// Structured-text forms of chains, wallets, transactions and offers.
// Field names are listed in docs/formats.md.

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "json.hpp"
#include "vouch/chain.hpp"
#include "vouch/protocol.hpp"
#include "vouch/wallet.hpp"

namespace vouch {

using Json = nlohmann::ordered_json;

Json to_json(const Transaction& tx);
/// Throws Error(parse_error), including when a stored txid disagrees with the body.
Transaction transaction_from_json(const Json& j);

Json to_json(const Block& block);
Block block_from_json(const Json& j);

/// One block per line, genesis first; the genesis line also records the subsidy.
void write_chain(const Chain& chain, std::ostream& out);
std::string block_line(const Block& block, const Chain& chain);
/// Replays and validates every block. Throws parse_error / corrupt_chain.
Chain read_chain(std::istream& in);

Chain load_chain(const std::filesystem::path& path);
void save_chain(const Chain& chain, const std::filesystem::path& path);
/// Appends the line for the chain's tip block under an exclusive advisory lock.
void append_tip(const Chain& chain, const std::filesystem::path& path);

Json to_json(const Wallet& wallet);
Wallet wallet_from_json(const Json& j);
Wallet load_wallet(const std::filesystem::path& path);
void save_wallet(const Wallet& wallet, const std::filesystem::path& path);

/// {"type": "voucher-offer", ...}: the producer-to-consumer exchange document.
Json to_json(const VoucherOffer& offer);
VoucherOffer offer_from_json(const Json& j);

/// {"type": "transaction", "tx": ...} or {"type": "bundle", "transactions": [...]}.
Json tx_document(const std::vector<Transaction>& txs);
std::vector<Transaction> txs_from_document(const Json& j);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace vouch
