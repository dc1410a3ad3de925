#pragma once

#include "conslin/workspace.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace conslin {

enum ExitCode : int { kOk = 0, kRejected = 2, kInputError = 3, kResidualFailure = 4 };

struct CommandOptions {
    std::optional<int> ansatz_order;
    std::optional<AnsatzShape> preset;
    std::uint64_t seed = 1;
    int probe_points = 20;
};

using Document = nlohmann::ordered_json;

struct CommandResult {
    int exit_code = kOk;
    Document doc;
};

CommandResult cmd_detsys(const Workspace& ws, const CommandOptions& opts);
CommandResult cmd_linearize(const Workspace& ws, const CommandOptions& opts);
CommandResult cmd_verify(const Workspace& ws, const CommandOptions& opts);

/// Loads `path` and dispatches on `command`; workspace errors become exit 3.
CommandResult run_command(const std::string& command, const std::string& path, const CommandOptions& opts);

/// Indented key-value rendering of a result document.
std::string render_text(const Document& doc);

extern const char* const kToolVersion;

} // namespace conslin
