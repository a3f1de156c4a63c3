#pragma once

#include <string>

#include "model.h"

namespace defembed {

enum class SaveMode { kBinary, kText };

// Binary files are little-endian with an 8-byte magic prefix and round-trip
// bit-exactly. Text files are line-oriented, print 17 significant digits and
// round-trip doubles exactly as well. Both writers go through a temp file
// and an atomic rename, so a failed save never leaves a partial file.
void save_model(const Model& m, const std::string& path, SaveMode mode);

// Detects the format from the file contents. Truncated or corrupt files
// fail with the offending byte offset or line; a format-version mismatch is
// reported explicitly.
Model load_model(const std::string& path);

// Write-to-temp plus atomic rename, shared by every file writer.
void write_file_atomic(const std::string& path, const std::string& contents);

// Shortest decimal form that round-trips a binary64 exactly (%.17g).
std::string format_double(double v);

}  // namespace defembed
