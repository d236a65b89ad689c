#pragma once

#include <string>

#include "bmatch/dynamics.hpp"
#include "bmatch/instance.hpp"
#include "bmatch/solver.hpp"

namespace bmatch {

// Instance files: {"peers":[{"id":0,"quota":1,"prefs":[2,1]},...]}.
// Ids must be exactly 0..n-1 in some order. Throws Error(parse_error) on
// malformed JSON and Error(validation) on semantic problems.
PreferenceInstance parse_instance(const std::string& text);
std::string serialize_instance(const PreferenceInstance& instance);

// Configuration files: {"pairs":[[0,1],[2,3]]}. Pairs are validated against
// the instance and written sorted.
Configuration parse_configuration(const PreferenceInstance& instance,
                                  const std::string& text);
std::string serialize_configuration(const Configuration& config);

// Plan files: {"actions":[[peer,proposal],...]}.
std::string serialize_plan(const InitiativePlan& plan);
InitiativePlan parse_plan(const std::string& text);

// One JSON object per line:
// {"step":1,"peer":0,"proposal":2,"active":true,"dropped":[3]}.
// A passive initiative has "proposal":null.
std::string trace_to_jsonl(const Trace& trace);

std::string stats_to_json(const RunStats& stats);

}  // namespace bmatch
