#include "trem/pipeline.h"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "trem/errors.h"
#include "trem/wav.h"

namespace trem {

FeatureMatrix analyze_file(const std::filesystem::path& path, const AnalysisConfig& cfg) {
  const AudioBuffer buf = load_audio(path);
  return compute_feature_matrix(buf, cfg, path.filename().string());
}

namespace {

FeatureMatrix maybe_smooth(const FeatureMatrix& m, const AnalysisConfig& cfg) {
  if (!cfg.smooth_enabled) return m;
  return smooth_columns(m, SmoothingConfig{cfg.smooth_cutoff_hz, cfg.smooth_order});
}

}  // namespace

FileRankResult rank_matrix(const FeatureMatrix& m, const AnalysisConfig& cfg) {
  const FeatureMatrix smoothed = maybe_smooth(m, cfg);
  const Standardized z = standardize(smoothed);
  const PcaResult res = pca(z);
  FileRankResult out;
  out.loadings = loading_modulus(res, m.names);
  out.ranking = rank_file(out.loadings, m.source_id);
  out.explained_pc1 = res.explained.empty() ? 0.0 : res.explained[0];
  out.explained_pc1_2 = res.cumulative.size() > 1 ? res.cumulative[1] : out.explained_pc1;
  return out;
}

RankReport rank_corpus(std::span<const FeatureMatrix> matrices, const AnalysisConfig& cfg,
                       int jobs) {
  if (matrices.empty()) throw InvalidArgument("rank_corpus: need at least one matrix");
  RankReport report;
  report.per_file.resize(matrices.size());
  parallel_for(matrices.size(), jobs, [&](std::size_t i) {
    report.per_file[i] = rank_matrix(matrices[i], cfg);
  });
  std::vector<FileRanking> rankings;
  rankings.reserve(matrices.size());
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    report.corpus.push_back(matrices[i].source_id);
    rankings.push_back(report.per_file[i].ranking);
  }
  report.aggregate_full = aggregate(rankings);
  report.excluded.assign(cfg.energy_blocklist.begin(), cfg.energy_blocklist.end());
  report.aggregate = exclude_energy(report.aggregate_full, cfg.energy_blocklist);
  return report;
}

nlohmann::json rank_report_json(const RankReport& report, const AnalysisConfig& cfg) {
  nlohmann::json per_file = nlohmann::json::array();
  for (const FileRankResult& fr : report.per_file) {
    nlohmann::json top10 = nlohmann::json::array();
    for (std::size_t i = 0; i < 10 && i < fr.ranking.order.size(); ++i) {
      const RankedFeature& f = fr.ranking.order[i];
      top10.push_back({{"name", f.name}, {"modulus", f.modulus}, {"weight", f.weight}});
    }
    nlohmann::json loadings = nlohmann::json::array();
    for (const Loading& l : fr.loadings.entries) {
      loadings.push_back({{"name", l.name}, {"l1", l.l1}, {"l2", l.l2}, {"modulus", l.modulus}});
    }
    per_file.push_back({{"source_id", fr.ranking.source_id},
                        {"explained_pc1", fr.explained_pc1},
                        {"explained_pc1_2", fr.explained_pc1_2},
                        {"top10", top10},
                        {"loadings", loadings}});
  }
  auto agg_json = [](const AggregateRanking& agg) {
    nlohmann::json arr = nlohmann::json::array();
    for (const AggregateEntry& e : agg.entries) {
      arr.push_back({{"name", e.name}, {"mean_weight", e.mean_weight}});
    }
    return arr;
  };
  return nlohmann::json{{"config", cfg.to_json()},
                        {"corpus", report.corpus},
                        {"per_file", per_file},
                        {"aggregate", agg_json(report.aggregate)},
                        {"aggregate_full", agg_json(report.aggregate_full)},
                        {"excluded", report.excluded}};
}

DetectResult detect_events(const FeatureMatrix& m, const AnalysisConfig& cfg) {
  DetectResult result;

  std::string feature = cfg.selected_feature;
  if (feature == "auto") {
    const FileRankResult ranked = rank_matrix(m, cfg);
    AggregateRanking agg = aggregate(std::span(&ranked.ranking, 1));
    agg = exclude_energy(agg, cfg.energy_blocklist);
    if (agg.entries.empty()) throw Error("detect: no features left after the blocklist");
    feature = agg.entries.front().name;
  }
  const int col = m.column_index(feature);
  if (col < 0) {
    std::string names;
    for (const std::string& n : m.names) {
      if (!names.empty()) names += ", ";
      names += n;
    }
    throw InvalidArgument("unknown feature '" + feature + "'; available: " + names);
  }
  result.feature = m.names[static_cast<std::size_t>(col)];

  const FeatureMatrix smoothed = maybe_smooth(m, cfg);

  DetectionTrace trace;
  trace.values = smoothed.column(static_cast<std::size_t>(col));
  trace.timestamps = smoothed.timestamps;
  trace.feature_rate = smoothed.feature_rate;
  trace.feature_name = result.feature;

  // Companion per-frame RMS for the gate comes from the time-domain
  // TotalEnergy column when present.
  std::vector<double> rms;
  const int energy_col = m.column_index("TotalEnergy");
  if (energy_col >= 0) {
    rms = m.column(static_cast<std::size_t>(energy_col));
    for (double& v : rms) v = std::sqrt(std::max(0.0, v));
  }

  const GateConfig gate_cfg{cfg.gate_start_trim_s, cfg.gate_end_trim_s, cfg.rms_floor};
  const DetectionTrace gated = gate(trace, gate_cfg, rms);
  result.gated = normalize_trace(gated);

  const DetectionTrace df = detection_function(result.gated);
  const PeakConfig peak_cfg{cfg.threshold_mode, cfg.threshold_k, cfg.threshold_fixed, 1.0,
                            cfg.min_spacing_s};
  result.events = pick_peaks(df, peak_cfg);
  if (result.events.onsets.size() >= 2) {
    result.ioi = inter_onset_intervals(result.events);
  }
  result.control = export_control(result.gated);
  return result;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs)
                                 : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace trem
