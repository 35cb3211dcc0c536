#pragma once

#include <string>

#include <json.hpp>

#include "sparselab/bench.hpp"
#include "sparselab/design.hpp"
#include "sparselab/diagnostics.hpp"
#include "sparselab/estimate.hpp"
#include "sparselab/instance.hpp"
#include "sparselab/oracle.hpp"

namespace sparselab {

using Json = nlohmann::json;

// Doubles are written with round-trip precision, so from_json(to_json(x))
// reproduces x bit for bit. Parse failures throw ParseError.

Json to_json(const DesignParams& params);
DesignParams design_params_from_json(const Json& j);

/// {"params", "true_support", "groups", "columns"}; `columns` is row-major
/// (m arrays of length p).
Json to_json(const DesignMatrix& design);
DesignMatrix design_from_json(const Json& j);

/// Ground truth and observation in a single object.
Json to_json(const GroundTruth& truth, const Observation& obs);
std::pair<GroundTruth, Observation> instance_from_json(const Json& j);

Json to_json(const CoherenceReport& report);
Json to_json(const Estimate& estimate);
Json to_json(const OracleResult& result);

Json to_json(const LassoConfig& config);
Json to_json(const SblHyper& hyper);
Json to_json(const ExperimentConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig experiment_config_from_json(const Json& j);

Json to_json(const TrialReport& trial);
Json to_json(const CellSummary& cell);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace sparselab
