#pragma once

// JSON reports (schema "dirichlet-species/v1"). Every report type converts
// to and from JSON without loss; non-finite numbers are written as the
// strings "inf", "-inf" and "nan".

#include "dspecies/dataio.hpp"
#include "dspecies/estimators.hpp"
#include "dspecies/gof.hpp"
#include "dspecies/simulate.hpp"
#include "dspecies/stopping.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace dspecies {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "dirichlet-species/v1";

Json to_json(const EstimateReport& r);
EstimateReport estimate_report_from_json(const Json& j);

Json to_json(const GofReport& r);
GofReport gof_report_from_json(const Json& j);

Json to_json(const StoppingReport& r);
StoppingReport stopping_report_from_json(const Json& j);

Json to_json(const SimulationReport& r);
SimulationReport simulation_report_from_json(const Json& j);

Json dataset_summary(const Dataset& d);

/// {"schema", "command", "seed" (if any), "inputs", "results"}.
Json make_envelope(const std::string& command, Json inputs, Json results,
                   std::optional<std::uint64_t> seed = std::nullopt);

/// Two-space indented JSON followed by a newline.
std::string dump_report(const Json& j);

/// Writes to `destination`, or to stdout when it is empty or "-".
/// IoError when the file cannot be written.
void write_report(const Json& j, const std::string& destination);

/// Parses report text; ValidationError on bad JSON or a different schema.
Json parse_report(const std::string& text);

}  // namespace dspecies
