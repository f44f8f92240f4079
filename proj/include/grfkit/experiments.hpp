#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace grfkit::cli {

inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;    // bad config / IO / usage
inline constexpr int kExitCapacity = 2;  // desk-scale numerical cap exceeded
inline constexpr int kExitAssert = 3;    // --assert and a verdict failed

struct RunOptions {
  std::optional<std::uint64_t> seed_override;  // --seed
  std::optional<int> threads_override;         // --threads
  bool assert_verdicts = false;                // --assert
};

struct Diagnostics {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
};

/// Static validation of a parsed config; `base_dir` resolves referenced
/// files.  Never executes the experiment.
Diagnostics validate_config(const nlohmann::json& config,
                            const std::filesystem::path& base_dir);

/// Validate the config file at `path` (exit-code semantics of the
/// `validate` subcommand: diagnostics printed by the caller).
Diagnostics validate_config_file(const std::filesystem::path& path);

/// Run the experiment described by the config file.  Returns a process exit
/// code.  Writes report.json, a CSV, and manifest.json into the config's
/// output_dir (or $OUTPUT_DIR when set); takes a lock file there for the
/// duration.  Outputs are byte-identical for identical config bytes and
/// effective seed, independent of thread count.
int run_config_file(const std::filesystem::path& path, const RunOptions& options);

}  // namespace grfkit::cli
