#pragma once

#include <string>

#include "mlca/learner.hpp"

namespace mlca {

// JSON snapshot, format_version 1. Doubles use shortest round-trip notation,
// so a reloaded model continues training in lockstep with one that never
// left memory. Malformed input raises DataError naming the offending field.
std::string model_to_json(const MlcaModel& model);
MlcaModel model_from_json(const std::string& text);

void save_model(const MlcaModel& model, const std::string& path);
MlcaModel load_model(const std::string& path);

}  // namespace mlca
