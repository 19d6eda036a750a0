#include "trem/feature_select.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <unordered_map>

#include <Eigen/Dense>

#include "trem/errors.h"

namespace trem {

namespace {

struct Biquad {
  double b0, b1, b2, a1, a2;
};

// Butterworth low-pass sections via the bilinear transform; one section per
// conjugate pole pair of the analog prototype.
std::vector<Biquad> butterworth_lowpass(double cutoff_hz, double rate_hz, int order) {
  const double k = std::tan(std::numbers::pi * cutoff_hz / rate_hz);
  const double k2 = k * k;
  std::vector<Biquad> sections;
  const int pairs = order / 2;
  for (int s = 0; s < pairs; ++s) {
    const double q = 1.0 / (2.0 * std::cos(std::numbers::pi * (2.0 * s + 1.0) / (2.0 * order)));
    const double norm = 1.0 / (1.0 + k / q + k2);
    Biquad bq;
    bq.b0 = k2 * norm;
    bq.b1 = 2.0 * bq.b0;
    bq.b2 = bq.b0;
    bq.a1 = 2.0 * (k2 - 1.0) * norm;
    bq.a2 = (1.0 - k / q + k2) * norm;
    sections.push_back(bq);
  }
  return sections;
}

void filter_in_place(const std::vector<Biquad>& sections, std::vector<double>& x) {
  for (const Biquad& s : sections) {
    double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + s.b1 * x1 + s.b2 * x2 - s.a1 * y1 - s.a2 * y2;
      x2 = x1;
      x1 = in;
      y2 = y1;
      y1 = out;
      v = out;
    }
  }
}

// Zero-phase pass: odd-reflection padding at both ends, filter forward,
// then backward, trim the padding.
std::vector<double> filtfilt(const std::vector<Biquad>& sections, const std::vector<double>& x,
                             int order) {
  const std::size_t n = x.size();
  const std::size_t pad = std::min<std::size_t>(3 * (static_cast<std::size_t>(order) + 1), n - 1);
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) ext.push_back(2.0 * x.front() - x[pad - i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 0; i < pad; ++i) ext.push_back(2.0 * x.back() - x[n - 2 - i]);

  filter_in_place(sections, ext);
  std::reverse(ext.begin(), ext.end());
  filter_in_place(sections, ext);
  std::reverse(ext.begin(), ext.end());

  return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
          ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

}  // namespace

FeatureMatrix smooth_columns(const FeatureMatrix& m, const SmoothingConfig& cfg) {
  const std::size_t rows = m.rows();
  if (rows < 8) throw InvalidArgument("smooth_columns: need at least 8 rows");
  if (!(cfg.cutoff_hz > 0.0) || !(cfg.cutoff_hz < m.feature_rate / 2.0)) {
    throw InvalidArgument("smooth_columns: cutoff must be in (0, feature_rate / 2)");
  }
  if (cfg.order < 2 || cfg.order % 2 != 0) {
    throw InvalidArgument("smooth_columns: order must be an even number >= 2");
  }

  const auto sections = butterworth_lowpass(cfg.cutoff_hz, m.feature_rate, cfg.order);
  FeatureMatrix out = m;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    std::vector<double> col = m.column(c);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    if (*lo == *hi) continue;  // constant columns pass through exactly
    const std::vector<double> smoothed = filtfilt(sections, col, cfg.order);
    for (std::size_t r = 0; r < rows; ++r) out.at(r, c) = smoothed[r];
  }
  return out;
}

Standardized standardize(const FeatureMatrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  if (rows < 2) throw InvalidArgument("standardize: need at least 2 rows");

  Standardized z;
  z.rows = rows;
  z.cols = cols;
  z.data.assign(rows * cols, 0.0);
  z.means.resize(cols);
  z.stds.resize(cols);
  z.degenerate.assign(cols, false);

  for (std::size_t c = 0; c < cols; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < rows; ++r) mean += m.at(r, c);
    mean /= static_cast<double>(rows);
    double var = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double d = m.at(r, c) - mean;
      var += d * d;
    }
    var /= static_cast<double>(rows);  // population
    const double std_dev = std::sqrt(var);
    z.means[c] = mean;
    z.stds[c] = std_dev;
    if (std_dev < 1e-12) {
      z.degenerate[c] = true;  // column stays all-zero
      continue;
    }
    for (std::size_t r = 0; r < rows; ++r) z.data[r * cols + c] = (m.at(r, c) - mean) / std_dev;
  }
  return z;
}

PcaResult pca(std::span<const double> data, std::size_t rows, std::size_t cols) {
  if (rows < 2) throw InvalidArgument("pca: need at least 2 rows");
  if (cols < 1) throw InvalidArgument("pca: need at least 1 column");
  for (double v : data) {
    if (!std::isfinite(v)) throw InvalidArgument("pca: non-finite input");
  }

  using Eigen::MatrixXd;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> z(
      data.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const MatrixXd corr = (z.transpose() * z) / static_cast<double>(rows);

  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(corr);
  if (solver.info() != Eigen::Success) throw Error("pca: eigendecomposition failed");

  // Eigen returns ascending eigenvalues; reorder to descending.
  std::vector<std::size_t> idx(cols);
  std::iota(idx.begin(), idx.end(), 0);
  std::reverse(idx.begin(), idx.end());

  PcaResult res;
  res.dim = cols;
  res.eigenvalues.resize(cols);
  res.eigenvectors.assign(cols * cols, 0.0);
  res.explained.resize(cols);
  res.cumulative.resize(cols);

  double total = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    const double lambda = std::max(0.0, solver.eigenvalues()(static_cast<Eigen::Index>(idx[j])));
    res.eigenvalues[j] = lambda;
    total += lambda;

    Eigen::VectorXd v = solver.eigenvectors().col(static_cast<Eigen::Index>(idx[j]));
    // Deterministic sign: the largest-magnitude entry is positive.
    Eigen::Index max_row = 0;
    v.cwiseAbs().maxCoeff(&max_row);
    if (v(max_row) < 0.0) v = -v;
    for (std::size_t k = 0; k < cols; ++k) {
      res.eigenvectors[k * cols + j] = v(static_cast<Eigen::Index>(k));
    }
  }

  double running = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    res.explained[j] = total > 0.0 ? res.eigenvalues[j] / total : 0.0;
    running += res.explained[j];
    res.cumulative[j] = running;
  }
  return res;
}

PcaResult pca(const Standardized& z) { return pca(z.data, z.rows, z.cols); }

LoadingTable loading_modulus(const PcaResult& res, std::span<const std::string> names) {
  if (res.dim < 2) throw InvalidArgument("loading_modulus: need at least 2 components");
  if (names.size() != res.dim) {
    throw InvalidArgument("loading_modulus: name count does not match PCA dimension");
  }
  LoadingTable table;
  table.entries.resize(res.dim);
  for (std::size_t k = 0; k < res.dim; ++k) {
    Loading& l = table.entries[k];
    l.name = names[k];
    l.l1 = res.loading(k, 0);
    l.l2 = res.loading(k, 1);
    l.modulus = std::hypot(l.l1, l.l2);
  }
  return table;
}

FileRanking rank_file(const LoadingTable& table, std::string source_id) {
  const std::size_t n = table.entries.size();
  if (n < 10) throw InvalidArgument("rank_file: need at least 10 features");

  FileRanking ranking;
  ranking.source_id = std::move(source_id);
  ranking.order.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    ranking.order[k].name = table.entries[k].name;
    ranking.order[k].column = k;
    ranking.order[k].modulus = table.entries[k].modulus;
  }
  // Descending modulus; ties keep column (canonical) order.
  std::stable_sort(ranking.order.begin(), ranking.order.end(),
                   [](const RankedFeature& a, const RankedFeature& b) {
                     return a.modulus > b.modulus;
                   });
  for (std::size_t pos = 0; pos < n; ++pos) {
    ranking.order[pos].weight = pos < 10 ? static_cast<int>(10 - pos) : 0;
  }
  return ranking;
}

AggregateRanking aggregate(std::span<const FileRanking> rankings) {
  if (rankings.empty()) throw InvalidArgument("aggregate: need at least one ranking");

  // Feature set and column order from the first ranking.
  const FileRanking& first = rankings.front();
  const std::size_t n_features = first.order.size();
  std::unordered_map<std::string, std::size_t> column_of;
  column_of.reserve(n_features);
  for (const RankedFeature& f : first.order) column_of[f.name] = f.column;

  AggregateRanking agg;
  agg.corpus_size = rankings.size();
  agg.entries.resize(n_features);
  for (const RankedFeature& f : first.order) {
    agg.entries[f.column].name = f.name;
    agg.entries[f.column].column = f.column;
  }

  for (const FileRanking& r : rankings) {
    if (r.order.size() != n_features) {
      throw InvalidArgument("aggregate: rankings cover different feature sets");
    }
    for (const RankedFeature& f : r.order) {
      auto it = column_of.find(f.name);
      if (it == column_of.end() || it->second != f.column) {
        throw InvalidArgument("aggregate: rankings cover different feature sets");
      }
      agg.entries[f.column].weight_sum += f.weight;
    }
  }
  for (AggregateEntry& e : agg.entries) {
    e.mean_weight = static_cast<double>(e.weight_sum) / static_cast<double>(agg.corpus_size);
  }
  std::stable_sort(agg.entries.begin(), agg.entries.end(),
                   [](const AggregateEntry& a, const AggregateEntry& b) {
                     return a.weight_sum > b.weight_sum;  // exact integer comparison
                   });
  return agg;
}

AggregateRanking exclude_energy(const AggregateRanking& agg,
                                std::span<const std::string> blocklist) {
  for (const std::string& name : blocklist) {
    const bool known = std::any_of(agg.entries.begin(), agg.entries.end(),
                                   [&](const AggregateEntry& e) { return e.name == name; });
    if (!known) throw InvalidArgument("exclude_energy: unknown feature '" + name + "'");
  }
  AggregateRanking out;
  out.corpus_size = agg.corpus_size;
  for (const AggregateEntry& e : agg.entries) {
    const bool blocked = std::any_of(blocklist.begin(), blocklist.end(),
                                     [&](const std::string& name) { return name == e.name; });
    if (!blocked) out.entries.push_back(e);
  }
  return out;
}

}  // namespace trem
