#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "trem/descriptors.h"

namespace trem {

struct SmoothingConfig {
  double cutoff_hz = 15.0;  // on the feature rate
  int order = 2;            // even, cascaded biquads
};

/// Zero-phase (forward-backward) Butterworth low-pass over every column.
/// Constant columns pass through untouched. Requires >= 8 rows and
/// 0 < cutoff < feature_rate / 2.
FeatureMatrix smooth_columns(const FeatureMatrix& m, const SmoothingConfig& cfg);

/// Column-wise z-scores with population std. Columns with std < 1e-12
/// become all-zero and are flagged degenerate.
struct Standardized {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major
  std::vector<double> means;
  std::vector<double> stds;
  std::vector<bool> degenerate;

  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

Standardized standardize(const FeatureMatrix& m);

/// Eigendecomposition of C = Z^T Z / rows. Components are sorted by
/// descending eigenvalue; each eigenvector is signed so its
/// largest-magnitude entry is positive.
struct PcaResult {
  std::size_t dim = 0;
  std::vector<double> eigenvalues;   // descending, clamped >= 0
  std::vector<double> eigenvectors;  // dim x dim row-major; column j = component j
  std::vector<double> explained;     // eigenvalues / sum
  std::vector<double> cumulative;    // running sum of explained

  double loading(std::size_t feature, std::size_t component) const {
    return eigenvectors[feature * dim + component];
  }
};

PcaResult pca(const Standardized& z);
PcaResult pca(std::span<const double> data, std::size_t rows, std::size_t cols);

struct Loading {
  std::string name;
  double l1 = 0.0;
  double l2 = 0.0;
  double modulus = 0.0;  // sqrt(l1^2 + l2^2)
};

/// Per-feature modulus of the first two component loadings. Requires
/// >= 2 components.
struct LoadingTable {
  std::vector<Loading> entries;  // in column order
};

LoadingTable loading_modulus(const PcaResult& res, std::span<const std::string> names);

/// A feature's rank entry for one file: the top ten features by descending
/// modulus receive weights 10..1, everything else 0. Ties break by column
/// order.
struct RankedFeature {
  std::string name;
  std::size_t column = 0;  // original column index, the tie-break key
  double modulus = 0.0;
  int weight = 0;
};

struct FileRanking {
  std::string source_id;
  std::vector<RankedFeature> order;  // all features, best first
};

/// Requires >= 10 features.
FileRanking rank_file(const LoadingTable& table, std::string source_id = {});

/// Corpus-mean weight per feature, Table 2 shape. weight_sum keeps the
/// exact integer mass (sum over files is 55 each) so the identity
/// sum_k mean_weight(k) = 55 is checkable without rounding.
struct AggregateEntry {
  std::string name;
  std::size_t column = 0;
  long weight_sum = 0;
  double mean_weight = 0.0;
};

struct AggregateRanking {
  std::size_t corpus_size = 0;
  std::vector<AggregateEntry> entries;  // descending mean weight
};

/// Throws InvalidArgument when rankings disagree on the feature set.
AggregateRanking aggregate(std::span<const FileRanking> rankings);

/// Removes the blocklisted features (default: the energy trio), keeping
/// the remaining order. Unknown names are an error.
AggregateRanking exclude_energy(const AggregateRanking& agg,
                                std::span<const std::string> blocklist);

}  // namespace trem
