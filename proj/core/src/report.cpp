#include "vouch/report.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace vouch {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string marker_text(const Hash160& marker) { return Address{kServiceMarkerVersion, marker}.text(); }

}  // namespace

std::string mode_name(const ScoringMode& mode) {
  return mode.is_weighted() ? "weighted" : "unweighted";
}

std::vector<ServiceReportRow> service_report(const ReputationIndex& index, const UrlRegistry& urls) {
  std::vector<ServiceReportRow> rows;
  for (const auto& [marker, stats] : index.services()) {
    rows.push_back(ServiceReportRow{marker_text(marker), urls.lookup(marker), stats.score, stats.events,
                                    stats.last_height});
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.marker < b.marker; });
  return rows;
}

std::string report_csv(const std::vector<ServiceReportRow>& rows) {
  std::ostringstream out;
  out << "marker,url,score,score_coins,events,last_height\n";
  for (const ServiceReportRow& r : rows) {
    out << r.marker << ',' << csv_field(r.url) << ',' << r.score.units() << ',' << format_coins(r.score) << ','
        << r.events << ',' << r.last_height << '\n';
  }
  return out.str();
}

Json producer_json(const ReputationIndex& index, const KeyId& producer, const UrlRegistry& urls) {
  const ProducerReputation rep = index.producer(producer);
  Json breakdown = Json::array();
  for (const auto& [service, score] : rep.breakdown) {
    breakdown.push_back(Json{{"marker", marker_text(service)},
                             {"url", urls.lookup(service)},
                             {"score", score.units()},
                             {"score_coins", format_coins(score)}});
  }
  return Json{{"producer", Address{kKeyHashVersion, producer}.text()},
              {"score", rep.total.units()},
              {"score_coins", format_coins(rep.total)},
              {"services", std::move(breakdown)}};
}

Json report_json(const ReputationIndex& index, const UrlRegistry& urls) {
  Json services = Json::array();
  for (const ServiceReportRow& r : service_report(index, urls)) {
    services.push_back(Json{{"marker", r.marker},
                            {"url", r.url},
                            {"score", r.score.units()},
                            {"score_coins", format_coins(r.score)},
                            {"events", r.events},
                            {"last_height", r.last_height}});
  }
  std::set<std::pair<std::string, KeyId>> producers;
  for (const ReputationEvent& e : index.events()) {
    producers.emplace(Address{kKeyHashVersion, e.producer}.text(), e.producer);
  }
  Json by_producer = Json::array();
  for (const auto& [text, id] : producers) by_producer.push_back(producer_json(index, id, urls));

  Json j;
  j["mode"] = mode_name(index.mode());
  if (index.mode().is_weighted()) j["c"] = index.mode().constant().units();
  j["indexed_through"] = index.indexed_through().value_or(0);
  j["events"] = index.events().size();
  j["services"] = std::move(services);
  j["producers"] = std::move(by_producer);
  return j;
}

}  // namespace vouch
