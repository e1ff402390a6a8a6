#pragma once

#include <json.hpp>

#include "sponge/box_oracle.hpp"
#include "sponge/dimension.hpp"
#include "sponge/family.hpp"
#include "sponge/hypothesis.hpp"
#include "sponge/spec.hpp"

namespace sponge {

using Json = nlohmann::ordered_json;

Json to_json(const ValidationReport& report);
Json to_json(const HypothesisReport& report);
Json to_json(const OptimizerConfig& config);
Json to_json(const DimensionReport& report, const SpongeSpec& spec);
Json to_json(const FamilySolution& solution, const SpongeSpec& spec);
Json to_json(const FiberRoots& roots, const SpongeSpec& spec);
Json to_json(const BoxCountEstimate& estimate);
Json to_json(const OracleComparison& comparison);

/// p as a nested [i][j] array.
Json nested_json(const NestedDistribution& p, const SpongeSpec& spec);

}  // namespace sponge
