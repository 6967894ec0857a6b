#pragma once

#include <filesystem>

#include "ddae_cli/io.hpp"

namespace ddae::cli {

// InterconnectFile layout:
//
//   {
//     "plant":      {"A", "B1", "B2", "C", "D1", "F"},      optional
//     "controller": {"K", "tau"},                          optional
//     "system":     SystemFile object,                     optional start
//     "steps": [
//       {"op": "close_feedback"},
//       {"op": "eliminate_feedthrough", "D2": M},
//       {"op": "absorb_io_delay", "path": "input"|"output", "matrix": M, "tau": t},
//       {"op": "from_neutral", "A0": M, "neutral": [{"M": D, "tau": h}, ...],
//        "retarded": [{"M": A, "tau": r}, ...], "B": M, "C": M}
//     ],
//     "metadata": {"name", "description"}                  optional
//   }
//
// close_feedback and from_neutral start a new system and must come first.
// eliminate_feedthrough and absorb_io_delay act on the current system; with
// no current system they start from the open-loop plant (or "system").
// An empty step list passes the plant through as an ODE system, or "system"
// through unchanged.

SystemDocument build_from_json(const nlohmann::json& doc);
SystemDocument build_from_file(const std::filesystem::path& path);

}  // namespace ddae::cli
