#pragma once

#include <nlohmann/json_fwd.hpp>

#include "collusion/fisher.hpp"
#include "collusion/incentives.hpp"
#include "collusion/instances.hpp"
#include "collusion/mechanisms.hpp"
#include "collusion/types.hpp"

namespace collusion {

// Rationals travel as "p/q" strings or bare JSON integers; good and agent
// indices are 0-based on the wire.

nlohmann::json rational_to_json(const Rational& q);
Rational rational_from_json(const nlohmann::json& j);

nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);

nlohmann::json profile_to_json(const OrdinalProfile& profile);
OrdinalProfile profile_from_json(const nlohmann::json& j);

nlohmann::json fractional_allocation_to_json(const FractionalAllocation& alloc);
FractionalAllocation fractional_allocation_from_json(const nlohmann::json& j);

nlohmann::json integral_allocation_to_json(const IntegralAllocation& alloc);
IntegralAllocation integral_allocation_from_json(const nlohmann::json& j);

nlohmann::json ps_trace_to_json(const PsTrace& trace);
nlohmann::json rr_trace_to_json(const RrTrace& trace);

nlohmann::json market_outcome_to_json(const fisher::MarketOutcome& outcome);

nlohmann::json coalition_to_json(const Coalition& coalition);
Coalition coalition_from_json(const nlohmann::json& j);

nlohmann::json ratio_report_to_json(const RatioReport& report);
nlohmann::json search_result_to_json(const SearchResult& result, const std::string& mechanism,
                                     int c);
nlohmann::json paper_instance_to_json(const PaperInstance& paper);

}  // namespace collusion
