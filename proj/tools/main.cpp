#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "trem/config.h"
#include "trem/csv.h"
#include "trem/descriptors.h"
#include "trem/errors.h"
#include "trem/pipeline.h"
#include "trem/vowel_synth.h"
#include "trem/wav.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::string config_path;
  int jobs = 0;  // 0 = hardware concurrency
  std::uint64_t seed = 1;
  std::string out_dir;
};

struct ConfigFlags {
  std::optional<int> frame_size, hop_size, max_harmonics, smooth_order;
  std::optional<std::string> window, threshold_mode, selected_feature;
  std::optional<double> f0_min, f0_max, voicing_threshold, harmonic_tol, smooth_cutoff,
      gate_start, gate_end, rms_floor, threshold_k, threshold_fixed, min_spacing;
  std::optional<bool> no_smooth, tristimulus_squared;
  std::optional<std::vector<std::string>> blocklist;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--frame-size", f.frame_size, "Analysis frame size in samples (power of two)");
  cmd->add_option("--hop-size", f.hop_size, "Hop size in samples");
  cmd->add_option("--window", f.window, "Analysis window: hann, hamming or rectangular");
  cmd->add_option("--f0-min", f.f0_min, "Pitch search floor in Hz");
  cmd->add_option("--f0-max", f.f0_max, "Pitch search ceiling in Hz");
  cmd->add_option("--voicing-threshold", f.voicing_threshold, "Voicing confidence threshold");
  cmd->add_option("--harmonic-tol", f.harmonic_tol, "Relative harmonic search width");
  cmd->add_option("--max-harmonics", f.max_harmonics, "Partials per frame");
  cmd->add_option("--smooth-cutoff", f.smooth_cutoff, "Trajectory low-pass cutoff in Hz");
  cmd->add_option("--smooth-order", f.smooth_order, "Trajectory low-pass order (even)");
  cmd->add_flag("--no-smooth", f.no_smooth, "Skip trajectory smoothing");
  cmd->add_flag("--tristimulus-squared", f.tristimulus_squared,
                "Compute tristimulus ratios on squared amplitudes");
  cmd->add_option("--gate-start", f.gate_start, "Seconds trimmed from the trace head");
  cmd->add_option("--gate-end", f.gate_end, "Seconds trimmed from the trace tail");
  cmd->add_option("--rms-floor", f.rms_floor, "Drop leading/trailing frames below this RMS");
  cmd->add_option("--threshold-mode", f.threshold_mode, "Peak threshold: fixed or median_mad");
  cmd->add_option("--threshold-k", f.threshold_k, "MAD multiplier for median_mad");
  cmd->add_option("--threshold-fixed", f.threshold_fixed, "Threshold value for fixed mode");
  cmd->add_option("--min-spacing", f.min_spacing, "Minimum onset spacing in seconds");
  cmd->add_option("--blocklist", f.blocklist, "Features excluded from the final ranking")
      ->delimiter(',');
  cmd->add_option("--feature", f.selected_feature,
                  "Feature to detect on (canonical name or 'auto')");
}

trem::AnalysisConfig resolve_config(const GlobalOptions& g, const ConfigFlags& f) {
  trem::AnalysisConfig cfg;
  if (!g.config_path.empty()) cfg = trem::AnalysisConfig::from_json_file(g.config_path);
  if (f.frame_size) cfg.frame_size = *f.frame_size;
  if (f.hop_size) cfg.hop_size = *f.hop_size;
  if (f.window) cfg.window = trem::window_from_name(*f.window);
  if (f.f0_min) cfg.f0_min_hz = *f.f0_min;
  if (f.f0_max) cfg.f0_max_hz = *f.f0_max;
  if (f.voicing_threshold) cfg.voicing_threshold = *f.voicing_threshold;
  if (f.harmonic_tol) cfg.harmonic_tol = *f.harmonic_tol;
  if (f.max_harmonics) cfg.max_harmonics = *f.max_harmonics;
  if (f.smooth_cutoff) cfg.smooth_cutoff_hz = *f.smooth_cutoff;
  if (f.smooth_order) cfg.smooth_order = *f.smooth_order;
  if (f.no_smooth && *f.no_smooth) cfg.smooth_enabled = false;
  if (f.tristimulus_squared && *f.tristimulus_squared) cfg.tristimulus_squared = true;
  if (f.gate_start) cfg.gate_start_trim_s = *f.gate_start;
  if (f.gate_end) cfg.gate_end_trim_s = *f.gate_end;
  if (f.rms_floor) cfg.rms_floor = *f.rms_floor;
  if (f.threshold_mode) cfg.threshold_mode = trem::threshold_mode_from_name(*f.threshold_mode);
  if (f.threshold_k) cfg.threshold_k = *f.threshold_k;
  if (f.threshold_fixed) cfg.threshold_fixed = *f.threshold_fixed;
  if (f.min_spacing) cfg.min_spacing_s = *f.min_spacing;
  if (f.blocklist) cfg.energy_blocklist = *f.blocklist;
  if (f.selected_feature) cfg.selected_feature = *f.selected_feature;
  cfg.validate();
  return cfg;
}

fs::path output_path(const GlobalOptions& g, const fs::path& input, const std::string& suffix) {
  const fs::path dir = g.out_dir.empty() ? input.parent_path() : fs::path(g.out_dir);
  return dir / (input.stem().string() + suffix);
}

bool has_extension(const fs::path& p, std::string_view ext) {
  std::string e = p.extension().string();
  for (char& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return e == ext;
}

void ensure_out_dir(const GlobalOptions& g) {
  if (!g.out_dir.empty()) fs::create_directories(g.out_dir);
}

int run_analyze(const GlobalOptions& g, const trem::AnalysisConfig& cfg,
                const std::vector<std::string>& inputs) {
  ensure_out_dir(g);
  std::vector<std::string> errors(inputs.size());
  trem::parallel_for(inputs.size(), g.jobs, [&](std::size_t i) {
    try {
      const fs::path input(inputs[i]);
      const trem::FeatureMatrix m = trem::analyze_file(input, cfg);
      const fs::path out = output_path(g, input, ".features.csv");
      trem::write_feature_csv(out, m);
      std::cout << input.string() << " -> " << out.string() << " (" << m.rows() << " frames)\n";
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  int failures = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!errors[i].empty()) {
      ++failures;
      std::cerr << "error: " << inputs[i] << ": " << errors[i] << "\n";
    }
  }
  return failures == 0 ? 0 : 1;
}

int run_rank(const GlobalOptions& g, const trem::AnalysisConfig& cfg,
             const std::vector<std::string>& inputs, const std::string& report_name) {
  ensure_out_dir(g);
  std::vector<trem::FeatureMatrix> matrices(inputs.size());
  std::vector<std::string> errors(inputs.size());
  trem::parallel_for(inputs.size(), g.jobs, [&](std::size_t i) {
    try {
      const fs::path input(inputs[i]);
      matrices[i] = has_extension(input, ".csv") ? trem::read_feature_csv(input)
                                                 : trem::analyze_file(input, cfg);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  std::vector<trem::FeatureMatrix> good;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (errors[i].empty()) {
      good.push_back(std::move(matrices[i]));
    } else {
      std::cerr << "warning: skipping " << inputs[i] << ": " << errors[i] << "\n";
    }
  }
  if (good.empty()) {
    std::cerr << "error: no usable inputs\n";
    return 1;
  }

  const trem::RankReport report = trem::rank_corpus(good, cfg, g.jobs);
  const fs::path out =
      (g.out_dir.empty() ? fs::path(".") : fs::path(g.out_dir)) / report_name;
  trem::atomic_write_text(out, trem::rank_report_json(report, cfg).dump(2) + "\n");

  std::cout << "corpus of " << report.corpus.size() << " file(s); post-blocklist top 10:\n";
  for (std::size_t i = 0; i < 10 && i < report.aggregate.entries.size(); ++i) {
    const auto& e = report.aggregate.entries[i];
    std::printf("%2zu. %-28s %.3f\n", i + 1, e.name.c_str(), e.mean_weight);
  }
  std::cout << "report: " << out.string() << "\n";
  return 0;
}

int run_detect(const GlobalOptions& g, const trem::AnalysisConfig& cfg,
               const std::string& input_str) {
  ensure_out_dir(g);
  const fs::path input(input_str);
  const trem::FeatureMatrix m = has_extension(input, ".csv") ? trem::read_feature_csv(input)
                                                             : trem::analyze_file(input, cfg);
  const trem::DetectResult result = trem::detect_events(m, cfg);

  const fs::path events_path = output_path(g, input, ".events.csv");
  const fs::path control_path = output_path(g, input, ".control.csv");
  const fs::path summary_path = output_path(g, input, ".detect.json");

  trem::write_events_csv(events_path, result.events);
  trem::write_control_csv(control_path, result.control);

  json summary{{"config", cfg.to_json()},
               {"feature", result.feature},
               {"n_events", result.events.onsets.size()},
               {"events_csv", events_path.string()},
               {"control_csv", control_path.string()}};
  if (result.ioi) {
    summary["ioi_mean_s"] = result.ioi->mean;
    summary["ioi_stdev_s"] = result.ioi->stdev;
    summary["rate_hz"] = result.ioi->rate_hz;
  }
  trem::atomic_write_text(summary_path, summary.dump(2) + "\n");

  std::cout << "feature: " << result.feature << "\n";
  std::cout << "events: " << result.events.onsets.size() << "\n";
  if (result.ioi) {
    std::printf("ioi mean %.4f s, stdev %.4f s, rate %.3f Hz\n", result.ioi->mean,
                result.ioi->stdev, result.ioi->rate_hz);
  } else {
    std::cerr << "warning: fewer than 2 events detected; no rate estimate\n";
  }
  std::cout << "wrote " << events_path.string() << ", " << control_path.string() << ", "
            << summary_path.string() << "\n";
  return 0;
}

int run_synth(const GlobalOptions& g, const std::string& spec_path, std::string out_name,
              int sample_rate, const std::string& format) {
  ensure_out_dir(g);
  std::ifstream in(spec_path);
  if (!in) throw trem::FileError("cannot open spec: " + spec_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw trem::InvalidArgument(std::string("invalid spec JSON: ") + e.what());
  }
  const trem::TremoloSpec spec = trem::tremolo_spec_from_json(j);

  if (out_name.empty()) out_name = fs::path(spec_path).stem().string() + ".wav";
  const fs::path out =
      (g.out_dir.empty() ? fs::path(spec_path).parent_path() : fs::path(g.out_dir)) / out_name;

  const trem::AudioBuffer buf = trem::synthesize_tremolo(spec, sample_rate, g.seed);
  const auto fmt = format == "float32" ? trem::WavSampleFormat::float32
                                       : trem::WavSampleFormat::pcm16;
  trem::write_wav(out, buf.samples, buf.sample_rate, fmt);

  json sidecar = trem::tremolo_spec_to_json(spec);
  sidecar["seed"] = g.seed;
  sidecar["sample_rate"] = buf.sample_rate;
  fs::path sidecar_path = out;
  sidecar_path += ".json";
  trem::atomic_write_text(sidecar_path, sidecar.dump(2) + "\n");

  std::cout << "wrote " << out.string() << " (" << buf.duration_s() << " s) and "
            << sidecar_path.string() << "\n";
  return 0;
}

int run_plot_data(const GlobalOptions& g, const std::string& input_str,
                  const std::vector<std::string>& columns) {
  ensure_out_dir(g);
  const fs::path input(input_str);

  if (has_extension(input, ".json")) {
    // Rank report: loading scatter in the (l1, l2) plane.
    std::ifstream in(input);
    if (!in) throw trem::FileError("cannot open report: " + input.string());
    json report;
    in >> report;
    if (!report.contains("per_file")) {
      throw trem::InvalidArgument("not a rank report (missing per_file): " + input.string());
    }
    std::string out_text = "source_id,feature,l1,l2,modulus\n";
    for (const auto& file : report.at("per_file")) {
      const std::string source = file.value("source_id", "?");
      for (const auto& l : file.at("loadings")) {
        out_text += source + ',' + l.at("name").get<std::string>() + ',' +
                    trem::format_full(l.at("l1").get<double>()) + ',' +
                    trem::format_full(l.at("l2").get<double>()) + ',' +
                    trem::format_full(l.at("modulus").get<double>()) + '\n';
      }
    }
    const fs::path out = output_path(g, input, ".scatter.csv");
    trem::atomic_write_text(out, out_text);
    std::cout << "wrote " << out.string() << "\n";
    return 0;
  }

  if (columns.empty()) throw trem::InvalidArgument("plot-data: no columns requested");
  const trem::FeatureMatrix m = trem::read_feature_csv(input);
  std::string out_text = "time_s,feature,value\n";
  for (const std::string& name : columns) {
    const int c = m.column_index(name);
    if (c < 0) {
      std::string names;
      for (const std::string& n : m.names) {
        if (!names.empty()) names += ", ";
        names += n;
      }
      throw trem::InvalidArgument("unknown column '" + name + "'; available: " + names);
    }
    for (std::size_t r = 0; r < m.rows(); ++r) {
      out_text += trem::format_full(m.timestamps[r]) + ',' + m.names[c] + ',' +
                  trem::format_full(m.at(r, static_cast<std::size_t>(c))) + '\n';
    }
  }
  const fs::path out = output_path(g, input, ".plot.csv");
  trem::atomic_write_text(out, out_text);
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vowel tremolo analysis: descriptor extraction, PCA feature ranking, "
               "rhythm detection and test-signal synthesis"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config_path, "Flat JSON config file (flags take precedence)");
  app.add_option("--jobs", g.jobs, "Worker threads for file-level parallelism (0 = auto)");
  app.add_option("--seed", g.seed, "Random seed for synthesis");
  app.add_option("--out", g.out_dir, "Output directory (default: alongside inputs)");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Extract 52-descriptor trajectories to CSV");
  std::vector<std::string> analyze_inputs;
  analyze->add_option("inputs", analyze_inputs, "WAV files")->required();
  ConfigFlags analyze_flags;
  add_config_flags(analyze, analyze_flags);

  // rank
  auto* rank = app.add_subcommand("rank", "Rank features across a corpus (PCA loading modulus)");
  std::vector<std::string> rank_inputs;
  std::string report_name = "rank_report.json";
  rank->add_option("inputs", rank_inputs, "WAV files or precomputed .features.csv")->required();
  rank->add_option("--report", report_name, "Report file name");
  ConfigFlags rank_flags;
  add_config_flags(rank, rank_flags);

  // detect
  auto* detect = app.add_subcommand("detect", "Detect tremolo events on a selected feature");
  std::string detect_input;
  detect->add_option("input", detect_input, "WAV file or .features.csv")->required();
  ConfigFlags detect_flags;
  add_config_flags(detect, detect_flags);

  // synth
  auto* synth = app.add_subcommand("synth", "Synthesize a vowel tremolo test signal");
  std::string synth_spec;
  std::string synth_out;
  int synth_rate = 44100;
  std::string synth_format = "pcm16";
  synth->add_option("spec", synth_spec, "TremoloSpec JSON file")->required();
  synth->add_option("-o,--output", synth_out, "Output WAV name");
  synth->add_option("--sample-rate", synth_rate, "Output sample rate");
  synth->add_option("--format", synth_format, "pcm16 or float32")
      ->check(CLI::IsMember({"pcm16", "float32"}));

  // plot-data
  auto* plot = app.add_subcommand("plot-data", "Emit plot-ready long-format CSV");
  std::string plot_input;
  std::vector<std::string> plot_columns;
  plot->add_option("input", plot_input, "Features CSV or rank report JSON")->required();
  plot->add_option("--columns", plot_columns, "Feature columns to export")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) return run_analyze(g, resolve_config(g, analyze_flags), analyze_inputs);
    if (*rank) return run_rank(g, resolve_config(g, rank_flags), rank_inputs, report_name);
    if (*detect) return run_detect(g, resolve_config(g, detect_flags), detect_input);
    if (*synth) return run_synth(g, synth_spec, synth_out, synth_rate, synth_format);
    if (*plot) return run_plot_data(g, plot_input, plot_columns);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
