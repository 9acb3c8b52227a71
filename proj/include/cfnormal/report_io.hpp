#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cfnormal/census.hpp"
#include "cfnormal/measures.hpp"
#include "cfnormal/stream_stats.hpp"

namespace cfn {

using Json = nlohmann::ordered_json;

Json pattern_json(const Pattern& s);

// {params, rows: [{pattern, count, N, empirical, mu, deviation}], growth: {logq, n, g_ref, ...}}
Json to_json(const NormalityReport& report);

Json to_json(const HypothesisRow& row);

// {params, rows: [{m, kind, eps, s, total, abnormal, ratio, normalized}]}
// wall_seconds is included only when timing is set, so default output is
// byte-identical across runs.
Json census_json(const std::vector<CensusReport>& reports, bool timing = false);

Json to_json(const MeasureEstimate& est);

Json to_json(const Constants& c);

// Columns: m,kind,eps,s,total,abnormal,ratio
std::string census_csv(const std::vector<CensusReport>& reports);

} // namespace cfn
