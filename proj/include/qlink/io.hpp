#pragma once

// JSON configuration ingestion and report emission.
//
// Config files are strict: unknown keys are rejected with the JSON pointer of
// the offending value, and "preset:<name>" strings expand to the built-in
// transducer and storage-qubit rows. Report values are rounded to nine
// significant digits; config values keep full round-trip precision.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qlink/delivery.hpp"
#include "qlink/distillation.hpp"
#include "qlink/mc_sim.hpp"
#include "qlink/model.hpp"
#include "qlink/planner.hpp"
#include "qlink/protocol.hpp"

namespace qlink::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "1.0.0";

struct ParsedConfig {
    std::optional<LinkConfig> link;
    std::optional<ArchitectureSpec> architecture;
};

/// Parses and validates. Throws ConfigError (schema or invariant violations,
/// messages carry JSON pointers or dotted field paths) or Error(Io).
ParsedConfig parse_config(const std::filesystem::path& path);
ParsedConfig parse_config_text(const std::string& text);

LinkConfig link_config_from_json(const Json& j);
ArchitectureSpec architecture_from_json(const Json& j, const std::string& pointer);

Json to_json(const TransducerParams& t);
Json to_json(const StorageQubitParams& q);
Json to_json(const ProtocolSpec& p);
Json to_json(const MemoryParams& m);
Json to_json(const DeliveryPolicy& p);
Json to_json(const LinkConfig& c);
Json to_json(const ArchitectureSpec& s);
Json to_json(const ParsedConfig& c);

/// Rounds to nine significant digits (non-finite values pass through).
double round9(double v);
/// Nine-significant-digit text form used in CSV output.
std::string format9(double v);

Json to_json(const LinkMetrics& m);
Json to_json(const ProtocolAnalytics& a);
Json to_json(const DeliveryOptimum& o);
Json to_json(const MCStats& s);
Json to_json(const DistillMCStats& s);
Json to_json(const DistillationOutcome& o);
Json to_json(const NestedDistillResult& r);
Json to_json(const PlanReport& r);
Json to_json(const CircuitCutComparison& c);
Json to_json(const CryostatBudget& b);
Json to_json(const TradeoffPoint& p);

std::string delivery_curve_csv(const DeliveryCurve& c);
std::string tradeoff_csv(const std::vector<TradeoffPoint>& points);
std::string trial_records_csv(const std::vector<TrialRecord>& records);
std::string metrics_csv(const LinkMetrics& m);

/// Infidelity breakdown for herald-time (probabilistic) and on-demand delivery.
struct InfidelityBreakdown {
    double protocol = 0.0;
    double thermal = 0.0;            // weighted by the fidelity model
    double storage_and_fallback = 0.0;  // F_her - F_del
    double total_heralded = 0.0;     // 1 - F_her
    double total_delivered = 0.0;    // 1 - F_del
};

InfidelityBreakdown infidelity_breakdown(const LinkConfig& config, const LinkMetrics& m);
std::string breakdown_csv(const InfidelityBreakdown& b);
Json to_json(const InfidelityBreakdown& b);

struct RunManifest {
    std::string tool_version = kToolVersion;
    std::string command;
    Json config;  // resolved, defaults materialized
    std::optional<std::uint64_t> seed;
    std::string started_at;
    std::string finished_at;
};

Json to_json(const RunManifest& m);
std::string utc_timestamp();

/// Writes to a sibling temporary file and renames it over `path`.
void write_artifact(const std::filesystem::path& path, const std::string& content);

}  // namespace qlink::io
