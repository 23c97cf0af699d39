#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "rnnp/model.hpp"

namespace rnnp {

/// Versioned model record. Layout is documented in docs/formats.md:
/// a first line holding the magic string "RNNP1", then a single JSON object.
struct Checkpoint {
    RnnSpec spec;
    FlatParams params;
    /// Named normalization statistics (e.g. "log_demand_mean").
    std::map<std::string, double> normalization;
    /// Serialized JSON object carried verbatim for higher layers ("{}" when unused).
    std::string extension = "{}";
};

inline constexpr const char* kCheckpointMagic = "RNNP1";

std::string serialize_checkpoint(const Checkpoint& checkpoint);
/// Throws DataError on a bad magic line or malformed body.
Checkpoint parse_checkpoint(const std::string& text);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace rnnp
