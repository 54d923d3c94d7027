#include "credit_transfer/serialization.hpp"

#include <cmath>

#include "credit_transfer/errors.hpp"

namespace credit_transfer {

namespace {

Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vector_from(const Json& a, const char* field) {
  if (!a.is_array()) throw DataError(std::string("field '") + field + "' must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw DataError(std::string("field '") + field + "' must hold numbers");
    v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  }
  return v;
}

const Json& require(const Json& doc, const char* field) {
  if (!doc.is_object() || !doc.contains(field))
    throw DataError(std::string("parameter document lacks field '") + field + "'");
  return doc.at(field);
}

}  // namespace

Json params_to_json(const LogisticParams& params, const std::vector<std::string>& feature_names) {
  Json j;
  j["intercept"] = params.intercept;
  j["coefficients"] = vector_json(params.coefficients);
  if (!feature_names.empty()) j["feature_names"] = feature_names;
  return j;
}

LogisticParams params_from_json(const Json& doc) {
  const Json& intercept = require(doc, "intercept");
  if (!intercept.is_number()) throw DataError("field 'intercept' must be a number");
  LogisticParams p{intercept.get<double>(), vector_from(require(doc, "coefficients"), "coefficients")};
  if (!std::isfinite(p.intercept) || !p.coefficients.allFinite())
    throw DataError("parameter document holds non-finite values");
  return p;
}

std::vector<std::string> feature_names_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("feature_names")) return {};
  return doc.at("feature_names").get<std::vector<std::string>>();
}

Json transfer_fit_to_json(const TransferFit& fit, const std::vector<std::string>& feature_names) {
  Json j;
  j["model"] = std::string(to_string(fit.kind));
  if (fit.transition) {
    j["c"] = fit.transition->shift;
    j["lambda"] = vector_json(fit.transition->scale);
    j["identifiable"] = fit.transition->identifiable;
  } else {
    j["c"] = nullptr;
    j["lambda"] = nullptr;
  }
  j["intercept"] = fit.target_params.intercept;
  j["coefficients"] = vector_json(fit.target_params.coefficients);
  if (!feature_names.empty()) j["feature_names"] = feature_names;
  j["log_likelihood"] = fit.log_likelihood;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["gradient_norm"] = fit.gradient_norm;
  j["free_parameters"] = fit.free_parameters;
  return j;
}

TransferFit transfer_fit_from_json(const Json& doc) {
  TransferFit fit;
  fit.kind = parse_link_model(require(doc, "model").get<std::string>());
  fit.target_params = params_from_json(doc);
  if (doc.contains("c") && !doc.at("c").is_null()) {
    TransitionParams t;
    t.shift = doc.at("c").get<double>();
    t.scale = vector_from(require(doc, "lambda"), "lambda");
    t.identifiable = doc.contains("identifiable")
                         ? doc.at("identifiable").get<std::vector<bool>>()
                         : std::vector<bool>(static_cast<std::size_t>(t.scale.size()), true);
    fit.transition = std::move(t);
  }
  fit.log_likelihood = doc.value("log_likelihood", 0.0);
  fit.converged = doc.value("converged", true);
  fit.iterations = doc.value("iterations", 0);
  fit.gradient_norm = doc.value("gradient_norm", 0.0);
  fit.free_parameters = doc.value("free_parameters", Eigen::Index{0});
  return fit;
}

Json error_report_to_json(const ConfusionCounts& counts, const ErrorReport& report) {
  Json j;
  j["threshold"] = report.threshold;
  j["test_error"] = report.test_error;
  j["type_i"] = report.type_i;
  j["type_ii"] = report.type_ii;
  j["type_i_undefined"] = report.type_i_undefined;
  j["type_ii_undefined"] = report.type_ii_undefined;
  j["counts"] = {{"tp", counts.true_positive},
                 {"fp", counts.false_positive},
                 {"tn", counts.true_negative},
                 {"fn", counts.false_negative}};
  return j;
}

Json link_report_to_json(const LinkConsistencyReport& report) {
  Json j;
  j["c_observed"] = report.c_observed;
  j["scale_observed"] = vector_json(report.scale_observed);
  j["max_residual"] = report.max_residual;
  j["consistent"] = report.consistent;
  j["source"] = params_to_json(report.source);
  j["target"] = params_to_json(report.target);
  return j;
}

}  // namespace credit_transfer
