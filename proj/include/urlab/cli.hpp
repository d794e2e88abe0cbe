#pragma once

// JSON-driven command surface shared by the urlab executable and its tests.

#include "urlab/analysis.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace urlab::cli {

inline constexpr const char* kToolName = "urlab";
inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSeedEnv = "URLAB_SEED";
inline constexpr std::uint64_t kDefaultSeed = 0;

enum class Command { check, scan, minimize, compare, divergence };

std::optional<Command> command_from_string(std::string_view s);
std::string_view to_string(Command c);

enum ExitCode : int {
    kExitOk = 0,
    kExitViolation = 1,
    kExitConfig = 2,
    kExitInput = 3,
    kExitNumeric = 4,
};

/// Malformed or inconsistent configuration (exit 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> dim;
    /// Raw value of the seed environment variable, if set.
    std::optional<std::string> env_seed;
};

struct RunConfig {
    Command command = Command::check;
    int hilbert_dim = kDefaultHilbertDim;
    std::uint64_t seed = kDefaultSeed;
    std::size_t ensemble_size = 1000;
    Tolerances tol{};
    /// The document as read, echoed into the report.
    nlohmann::json doc;
};

/// flag > env > config > default.
std::uint64_t resolve_seed(const Overrides& o, const nlohmann::json& doc);

RunConfig parse_config(Command command, const nlohmann::json& doc, const Overrides& o = {});

struct RunResult {
    nlohmann::json report;
    int exit_code = kExitOk;
};

RunResult run_check(const RunConfig& cfg);
RunResult run_scan(const RunConfig& cfg);
RunResult run_minimize(const RunConfig& cfg);
RunResult run_compare(const RunConfig& cfg);
RunResult run_divergence(const RunConfig& cfg);

/// Parses, dispatches and maps every failure to its exit code; never throws.
RunResult run(Command command, const std::string& config_text, const Overrides& o = {});

/// Builder vocabulary, exposed for tests.
cplx parse_complex(const nlohmann::json& j);
Observable build_observable(const nlohmann::json& j, int hilbert_dim);
QuantumState build_state(const nlohmann::json& j, int hilbert_dim);

}  // namespace urlab::cli
