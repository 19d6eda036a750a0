#pragma once

#include <filesystem>
#include <string>

#include "trem/descriptors.h"
#include "trem/event_detect.h"

namespace trem {

/// Writes a string to `path` atomically (temp file + rename).
void atomic_write_text(const std::filesystem::path& path, const std::string& text);

/// Formats a double with enough digits to round-trip exactly.
std::string format_full(double v);

/// Header: time_s + column names; one row per frame, full-precision values.
void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& m);
std::string feature_csv_text(const FeatureMatrix& m);

/// Throws FileError / Error on missing files or malformed rows.
FeatureMatrix read_feature_csv(const std::filesystem::path& path);

/// Columns onset_s, peak_value.
void write_events_csv(const std::filesystem::path& path, const EventList& ev);

/// Columns index, time_s, value.
void write_control_csv(const std::filesystem::path& path, const ControlBuffer& cb);
ControlBuffer read_control_csv(const std::filesystem::path& path);

}  // namespace trem
