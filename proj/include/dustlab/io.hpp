#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "dustlab/core.hpp"
#include "dustlab/detector.hpp"
#include "dustlab/functional.hpp"
#include "dustlab/trajectory.hpp"

/// Scenario files are JSON documents (schema in README.md). Time series
/// are CSV; certificates, events and reports are JSON. Floats in CSV use
/// 17 significant digits; JSON uses shortest round-trip form.
namespace dustlab::io {

using Json = nlohmann::ordered_json;

/// Throws ValidationError on missing/unknown keys or wrong types.
Scenario scenario_from_json(const Json& doc);
Json scenario_to_json(const Scenario& scenario);
Scenario load_scenario(const std::filesystem::path& path);

std::string format_double(double value);

const char* geometry_name(Geometry g);

void write_diagnostics_csv(std::ostream& os, const Trajectory& trajectory);

/// Per-marker rows at t = 0, at every requested snapshot time and at the
/// final accepted step.
void write_markers_csv(std::ostream& os, const Trajectory& trajectory);

Json to_json(const DiagnosticsRecord& record);
Json to_json(const BlowupEvent& event);
Json to_json(const BlowupCertificate& certificate);
Json to_json(const detector::EscapeReport& report);
Json to_json(const functional::ProofChainReport& report);

std::string proof_chain_summary(const functional::ProofChainReport& report, const Trajectory& trajectory);

} // namespace dustlab::io
