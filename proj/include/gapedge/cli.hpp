#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace gapedge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitMalformed = 2;
inline constexpr int kExitUnknownCommand = 3;
inline constexpr int kExitInvalid = 4;
inline constexpr int kExitModule = 5;

enum class Command { MathieuRate, DipoleCount, VerifyRate, DiracChannel, Dirac2D, ChargeReport };
enum class Format { Json, Csv };

std::string_view command_name(Command c);

/// A validated run. `parameters` is normalized: every default is filled in,
/// so echo() parsed again yields an equal RunConfig.
struct RunConfig {
    Command command = Command::MathieuRate;
    nlohmann::json parameters = nlohmann::json::object();
    std::string output_path;  // empty means standard output
    Format format = Format::Json;
    bool timing = false;      // wall time in the JSON report (off keeps output reproducible)

    nlohmann::json echo() const;
    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Carries the exit code that the failure maps to.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
    int exit_code() const noexcept { return code_; }

private:
    int code_;
};

RunConfig parse_config(std::string_view text);
/// Same, for a document that is already parsed.
RunConfig parse_document(const nlohmann::json& doc);

/// Runs the module operation and returns the artifact text. The compute
/// time is stored in `wall_seconds` when given.
std::string render(const RunConfig& config, double* wall_seconds = nullptr);

/// Renders and writes the artifact (temp file plus rename, or stdout).
/// Returns the exit code; diagnostics go to `err`.
int run(const RunConfig& config, std::ostream& err);

int main(int argc, char** argv);

}  // namespace gapedge::cli
