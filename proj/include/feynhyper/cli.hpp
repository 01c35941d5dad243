#pragma once

// Command-line front end: eval, verify, sweep, pin and list, with text or
// JSON output. run_cli is the whole program minus process plumbing, so
// exit codes and output streams can be tested in-process.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "feynhyper/identities.hpp"

namespace feynhyper {

inline constexpr const char* kToolVersion = "feynhyper 0.1.0";

enum class OutputFormat { Json, Text };

struct CliConfig {
  int digits = 50;  // [10, 1000]
  std::uint64_t seed = 1;
  std::optional<std::string> output_path;
  OutputFormat format = OutputFormat::Json;
};

/// Exit codes shared by every verb.
enum ExitCode : int {
  kExitOk = 0,
  kExitFail = 1,
  kExitEvaluation = 2,  // DomainError/PoleError, SKIP, NoBracket
  kExitUsage = 3,
};

/// Runs one command; `args` excludes the program name. Results go to `out`
/// (or to --out), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct Summary {
  int pass = 0;
  int fail = 0;
  int skip = 0;
};

Summary tally(const std::vector<VerificationReport>& reports);

/// Decimal rendering with `digits` significant digits, exponent only when
/// needed ("%.*Rg").
std::string format_real(const Real& r, int digits);

nlohmann::ordered_json report_to_json(const VerificationReport& rep);

/// Inverse of report_to_json; re-serialising the result reproduces the input.
VerificationReport report_from_json(const nlohmann::ordered_json& j);

struct ReportFile {
  std::string tool_version;
  std::string command_line;
  std::vector<VerificationReport> reports;
  Summary summary;
};

nlohmann::ordered_json report_file_to_json(const ReportFile& file);

/// Parses and checks a ReportFile (summary must equal the tally of reports).
/// std::invalid_argument on schema violations.
ReportFile report_file_from_json(const nlohmann::ordered_json& j);

}  // namespace feynhyper
