#pragma once

// JSON/CSV emission with fixed column order for every reportable result.

#include <string>

#include <json.hpp>

#include "medgap/balance.hpp"
#include "medgap/decomposition.hpp"
#include "medgap/ols.hpp"
#include "medgap/pipeline.hpp"
#include "medgap/synthetic.hpp"

namespace medgap {

using Json = nlohmann::ordered_json;

Json to_json(const EffectEstimate& estimate);
Json to_json(const DecompositionResult& result);
Json to_json(const BalanceTable& table);
Json to_json(const SupportHistogram& histogram);
Json to_json(const McReport& report);

std::string to_csv(const DecompositionResult& result);
std::string to_csv(const BalanceTable& table);
std::string to_csv(const SupportHistogram& histogram);

}  // namespace medgap
