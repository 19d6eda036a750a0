#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trem/config.h"
#include "trem/descriptors.h"
#include "trem/event_detect.h"
#include "trem/feature_select.h"

#include "json.hpp"

namespace trem {

/// Decode + descriptor extraction for one file.
FeatureMatrix analyze_file(const std::filesystem::path& path, const AnalysisConfig& cfg);

/// smooth -> standardize -> pca -> modulus -> rank for one matrix.
struct FileRankResult {
  FileRanking ranking;
  LoadingTable loadings;
  double explained_pc1 = 0.0;
  double explained_pc1_2 = 0.0;
};

FileRankResult rank_matrix(const FeatureMatrix& m, const AnalysisConfig& cfg);

struct RankReport {
  std::vector<std::string> corpus;  // source ids
  std::vector<FileRankResult> per_file;
  AggregateRanking aggregate_full;  // before the blocklist
  AggregateRanking aggregate;       // after the blocklist
  std::vector<std::string> excluded;
};

RankReport rank_corpus(std::span<const FeatureMatrix> matrices, const AnalysisConfig& cfg,
                       int jobs = 0);

nlohmann::json rank_report_json(const RankReport& report, const AnalysisConfig& cfg);

/// Gate -> normalize -> derivative -> peak picking on one selected feature
/// trajectory. "auto" selection runs the ranking machinery on the single
/// file and picks the post-blocklist top feature.
struct DetectResult {
  std::string feature;             // resolved name
  DetectionTrace gated;            // normalized, control-ready
  EventList events;
  std::optional<IoiStats> ioi;     // absent when < 2 events
  ControlBuffer control;
};

DetectResult detect_events(const FeatureMatrix& m, const AnalysisConfig& cfg);

/// Runs fn(i) for i in [0, n) on up to `jobs` worker threads. Exceptions
/// propagate to the caller.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace trem
