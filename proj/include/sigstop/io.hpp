#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "json.hpp"
#include "sigstop/backtest.hpp"
#include "sigstop/engine.hpp"
#include "sigstop/models.hpp"
#include "sigstop/policy.hpp"
#include "sigstop/signature.hpp"

namespace sigstop {

using Json = nlohmann::json;

// {"dimension":d,"order":N,"levels":[[1],[...],...]}
Json signature_to_json(const Signatured& sig);

// {"dimension","order","threshold","sharpness","normalizer":{"mean","scale"},"coefficients":[...]}
Json policy_to_json(const LinearPolicy& policy);
LinearPolicy policy_from_json(const Json& j);

Json ou_to_json(const OUParams& params);
OUParams ou_from_json(const Json& j);

Json spread_to_json(const SpreadSpec& spec);

// {"side","trades":[{"entry_index","exit_index","entry_value","exit_value"}],"forced_close"}
Json schedule_to_json(const TradeSchedule& schedule);
Json audit_to_json(const TradeSchedule& schedule);

Json report_to_json(const PerformanceReport& report);

// CSV rows `t,x1,...,xd`; a non-numeric first row is treated as a header.
Pathd read_path_csv(const std::filesystem::path& file);
Pathd parse_path_csv(std::istream& in);
void write_path_csv(std::ostream& out, const Pathd& path);

}  // namespace sigstop
