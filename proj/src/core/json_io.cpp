#include "bmatch/json_io.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bmatch/error.hpp"

namespace bmatch {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json parse_json(const std::string& text, const char* what) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    throw Error(ErrorCode::parse_error,
                std::string("malformed JSON in ") + what);
  }
  return doc;
}

long long require_int(const json& value, const std::string& where) {
  if (!value.is_number_integer()) {
    throw Error(ErrorCode::parse_error, where + " must be an integer");
  }
  return value.get<long long>();
}

PeerId require_peer_id(const json& value, const std::string& where) {
  const long long id = require_int(value, where);
  if (id < 0) {
    throw Error(ErrorCode::parse_error, where + " must be non-negative");
  }
  return static_cast<PeerId>(id);
}

}  // namespace

PreferenceInstance parse_instance(const std::string& text) {
  const json doc = parse_json(text, "instance document");
  if (!doc.is_object() || !doc.contains("peers") || !doc["peers"].is_array()) {
    throw Error(ErrorCode::parse_error,
                "instance document must be an object with a \"peers\" array");
  }
  std::map<PeerId, int> quotas;
  std::map<PeerId, std::vector<PeerId>> lists;
  for (const auto& entry : doc["peers"]) {
    if (!entry.is_object() || !entry.contains("id")) {
      throw Error(ErrorCode::parse_error, "peer entry missing \"id\"");
    }
    const PeerId id = require_peer_id(entry["id"], "peer id");
    const std::string where = "peer " + std::to_string(id);
    if (!entry.contains("quota")) {
      throw Error(ErrorCode::parse_error, where + " missing \"quota\"");
    }
    if (!entry.contains("prefs") || !entry["prefs"].is_array()) {
      throw Error(ErrorCode::parse_error, where + " missing \"prefs\" array");
    }
    const long long quota = require_int(entry["quota"], where + " quota");
    if (quotas.count(id)) {
      throw Error(ErrorCode::parse_error, where + " appears twice");
    }
    quotas[id] = static_cast<int>(quota);
    auto& list = lists[id];
    for (const auto& pref : entry["prefs"]) {
      list.push_back(require_peer_id(pref, where + " preference entry"));
    }
  }
  return PreferenceInstance::from_maps(quotas, lists);
}

std::string serialize_instance(const PreferenceInstance& instance) {
  ordered_json peers = ordered_json::array();
  for (PeerId p = 0; p < instance.peer_count(); ++p) {
    ordered_json entry;
    entry["id"] = p;
    entry["quota"] = instance.quota(p);
    entry["prefs"] = instance.list(p);
    peers.push_back(std::move(entry));
  }
  ordered_json doc;
  doc["peers"] = std::move(peers);
  return doc.dump() + "\n";
}

Configuration parse_configuration(const PreferenceInstance& instance,
                                  const std::string& text) {
  const json doc = parse_json(text, "configuration document");
  if (!doc.is_object() || !doc.contains("pairs") || !doc["pairs"].is_array()) {
    throw Error(ErrorCode::parse_error,
                "configuration document must be an object with a \"pairs\" array");
  }
  std::vector<PeerPair> pairs;
  for (const auto& entry : doc["pairs"]) {
    if (!entry.is_array() || entry.size() != 2) {
      throw Error(ErrorCode::parse_error,
                  "configuration pair must be a two-element array");
    }
    pairs.emplace_back(require_peer_id(entry[0], "pair endpoint"),
                       require_peer_id(entry[1], "pair endpoint"));
  }
  Configuration config(pairs);
  if (config.size() != pairs.size()) {
    throw Error(ErrorCode::validation,
                "configuration document lists a pair twice");
  }
  validate_configuration(instance, config);
  return config;
}

std::string serialize_configuration(const Configuration& config) {
  ordered_json pairs = ordered_json::array();
  for (const auto& pair : config.pairs()) {
    pairs.push_back({pair.a, pair.b});
  }
  ordered_json doc;
  doc["pairs"] = std::move(pairs);
  return doc.dump() + "\n";
}

std::string serialize_plan(const InitiativePlan& plan) {
  ordered_json actions = ordered_json::array();
  for (const auto& [peer, proposal] : plan.actions) {
    actions.push_back({peer, proposal});
  }
  ordered_json doc;
  doc["actions"] = std::move(actions);
  return doc.dump() + "\n";
}

InitiativePlan parse_plan(const std::string& text) {
  const json doc = parse_json(text, "plan document");
  if (!doc.is_object() || !doc.contains("actions") ||
      !doc["actions"].is_array()) {
    throw Error(ErrorCode::parse_error,
                "plan document must be an object with an \"actions\" array");
  }
  InitiativePlan plan;
  for (const auto& entry : doc["actions"]) {
    if (!entry.is_array() || entry.size() != 2) {
      throw Error(ErrorCode::parse_error,
                  "plan action must be a two-element array");
    }
    plan.actions.emplace_back(require_peer_id(entry[0], "plan actor"),
                              require_peer_id(entry[1], "plan proposal"));
  }
  return plan;
}

std::string trace_to_jsonl(const Trace& trace) {
  std::string out;
  for (const auto& event : trace.events) {
    ordered_json line;
    line["step"] = event.step;
    line["peer"] = event.peer;
    if (event.proposal) {
      line["proposal"] = *event.proposal;
    } else {
      line["proposal"] = nullptr;
    }
    line["active"] = event.active;
    line["dropped"] = event.dropped;
    out += line.dump();
    out += "\n";
  }
  return out;
}

std::string stats_to_json(const RunStats& stats) {
  ordered_json doc;
  doc["total_initiatives"] = stats.total_initiatives;
  doc["active_initiatives"] = stats.active_initiatives;
  if (stats.rounds) {
    doc["rounds"] = *stats.rounds;
  } else {
    doc["rounds"] = nullptr;
  }
  doc["converged"] = stats.converged;
  if (stats.steps_to_convergence) {
    doc["steps_to_convergence"] = *stats.steps_to_convergence;
  } else {
    doc["steps_to_convergence"] = nullptr;
  }
  ordered_json pairs = ordered_json::array();
  for (const auto& pair : stats.final_configuration.pairs()) {
    pairs.push_back({pair.a, pair.b});
  }
  doc["final_configuration"] = ordered_json{{"pairs", std::move(pairs)}};
  return doc.dump() + "\n";
}

}  // namespace bmatch
