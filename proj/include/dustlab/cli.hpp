#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dustlab/core.hpp"
#include "dustlab/detector.hpp"

namespace dustlab::cli {

enum ExitCode : int {
  kSuccess = 0,
  kValidation = 1,
  kHypothesisViolated = 2,
  kNumericFailure = 3,
  kContradiction = 4,
};

enum class Command { Simulate, Certify, Verify, Sweep };

const char* to_string(Command c);

/// Inclusive linear grid "a:b:n"; value i is a + (b - a) * i / (n - 1).
struct Grid {
  double first = 0.0;
  double last = 0.0;
  int count = 1;

  std::vector<double> values() const;
};

/// Throws std::invalid_argument on malformed input.
Grid parse_grid(const std::string& spec);

struct RunManifest {
  std::filesystem::path scenario_path;
  Command command = Command::Simulate;
  std::filesystem::path output_dir;
  bool deterministic = true;
  std::string tool_version;
  std::optional<Grid> lambda_grid;
  std::optional<Grid> h0_grid;
  int jobs = 1;
};

std::string tool_version();

/// Certificate for the scenario's initial data: M and H(0) from the
/// initial markers.
BlowupCertificate certify_scenario(const ValidatedScenario& scenario);

enum class SweepAxis { Lambda, H0 };

struct SweepRow {
  double value = 0.0;
  CertificateCase certificate_case = CertificateCase::NoCertificate;
  std::optional<double> t_bound;
  std::optional<double> event_time; // t_hi of the detector event
  std::optional<std::string> event_trigger;
  double max_support_volume = 0.0;
  std::optional<std::string> escape;
  std::optional<std::string> error;
};

/// One independent run per grid value. Rows come back in grid order
/// whatever `jobs` is.
std::vector<SweepRow> sweep(const ValidatedScenario& base, SweepAxis axis, const std::vector<double>& values,
                            int jobs = 1);

/// Scenario with the Hubble rate chosen so that H(0) equals `h0`; only
/// zero and Hubble velocity profiles can be rescaled this way.
Scenario with_initial_functional(const ValidatedScenario& base, double h0);

int exit_code_for(detector::EscapeKind kind);

int run_simulate(const RunManifest& manifest, std::ostream& out);
int run_certify(const RunManifest& manifest, std::ostream& out);
int run_verify(const RunManifest& manifest, std::ostream& out);
int run_sweep(const RunManifest& manifest, std::ostream& out);

/// Dispatches on manifest.command and maps exceptions to exit codes.
int run(const RunManifest& manifest, std::ostream& out, std::ostream& err);

} // namespace dustlab::cli
