#pragma once

// Config-driven experiment workflows: each kind reads its parameter
// block, runs the matching modules, and emits CSV outputs, a plot
// script, and a run manifest. Outputs are written only after the
// computation succeeds; anything written before a failure is removed.

#include <filesystem>
#include <string>

#include "wgqed/io.hpp"

namespace wgqed {

inline constexpr const char *kVersion = "wgqed 1.0.0";

// Throws ValidationError (bad config), IngestionError, or the numerical
// errors from the underlying modules.
void run_experiment(const Config &config,
                    const std::filesystem::path &output_dir);

// Output directory resolution: config [run] output_dir, else the
// WGQED_OUTPUT_DIR environment variable, else ".".
std::filesystem::path resolve_output_dir(const Config &config);

} // namespace wgqed
