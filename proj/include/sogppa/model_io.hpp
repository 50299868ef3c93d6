#pragma once

#include <string>

#include "sogppa/estimators.hpp"

namespace sogppa {

struct ModelIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Versioned text documents. Doubles are emitted in shortest round-trip decimal
// form, so a load restores every parameter bit-exactly.
std::string forest_to_string(const Forest& forest);
Forest forest_from_string(const std::string& text);

std::string gbm_to_string(const Gbm& gbm);
Gbm gbm_from_string(const std::string& text);

std::string gcn_to_string(const GcnModel& model);
GcnModel gcn_from_string(const std::string& text);

std::string bundle_to_string(const ModelBundle& bundle);
ModelBundle bundle_from_string(const std::string& text);

void save_bundle(const ModelBundle& bundle, const std::string& path);
ModelBundle load_bundle(const std::string& path);

} // namespace sogppa
