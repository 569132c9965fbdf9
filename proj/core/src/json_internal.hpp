#pragma once

// nlohmann/json conversions shared by the core translation units. Kept out of
// the public headers so consumers of the installed library never see it.

#include "texstat/config.hpp"
#include "texstat/filterbank.hpp"
#include "texstat/statistics.hpp"

#include <nlohmann/json.hpp>

namespace texstat::detail {

using json = nlohmann::ordered_json;

json to_json_value(const FilterbankSpec& spec);
FilterbankSpec filterbank_spec_from_json(const json& j);

json to_json_value(const StatsConfig& cfg);
StatsConfig stats_config_from_json(const json& j);

json to_json_value(const GlobalConfig& cfg);
GlobalConfig global_config_from_json(const json& j);

json to_json_value(const BlockMask& mask);
BlockMask block_mask_from_json(const json& j);

}  // namespace texstat::detail
