#pragma once

#include <map>
#include <string>
#include <vector>

#include "vouch/reputation.hpp"
#include "vouch/store.hpp"

namespace vouch {

/// Marker payload -> url. Markers are one-way hashes, so urls are only shown
/// for services the caller registers.
class UrlRegistry {
 public:
  void add(const std::string& url) { urls_[derive_service_address(url).payload] = url; }
  std::string lookup(const Hash160& marker) const {
    const auto it = urls_.find(marker);
    return it == urls_.end() ? std::string{} : it->second;
  }

 private:
  std::map<Hash160, std::string> urls_;
};

struct ServiceReportRow {
  std::string marker;  // address text
  std::string url;     // empty when unknown
  Amount score;
  std::uint64_t events = 0;
  std::uint64_t last_height = 0;
};

/// Rows ordered by marker address text.
std::vector<ServiceReportRow> service_report(const ReputationIndex& index, const UrlRegistry& urls);

/// Columns: marker,url,score,score_coins,events,last_height
std::string report_csv(const std::vector<ServiceReportRow>& rows);

/// Services plus per-producer totals and breakdowns.
Json report_json(const ReputationIndex& index, const UrlRegistry& urls);

Json producer_json(const ReputationIndex& index, const KeyId& producer, const UrlRegistry& urls);

std::string mode_name(const ScoringMode& mode);

}  // namespace vouch
