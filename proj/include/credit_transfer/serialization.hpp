#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "credit_transfer/evaluation.hpp"
#include "credit_transfer/gaussian_links.hpp"
#include "credit_transfer/link_models.hpp"
#include "credit_transfer/logistic.hpp"

namespace credit_transfer {

using Json = nlohmann::ordered_json;

// Parameter documents are JSON objects with fields in a fixed order:
//   {"intercept": ..., "coefficients": [...], "feature_names": [...]}
// Transfer fits add the model tag and transition parameters in front.
// Doubles are written in shortest round-trip form.

Json params_to_json(const LogisticParams& params,
                    const std::vector<std::string>& feature_names = {});
/// Accepts a params document or a transfer-fit document.
LogisticParams params_from_json(const Json& doc);
/// Empty when the document carries no names.
std::vector<std::string> feature_names_from_json(const Json& doc);

Json transfer_fit_to_json(const TransferFit& fit,
                          const std::vector<std::string>& feature_names = {});
TransferFit transfer_fit_from_json(const Json& doc);

Json error_report_to_json(const ConfusionCounts& counts, const ErrorReport& report);
Json link_report_to_json(const LinkConsistencyReport& report);

}  // namespace credit_transfer
