#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "kgcast/artifact.hpp"
#include "kgcast/features.hpp"

namespace kgcast {

// Row roles inside a dataset file.
enum class RowRole : uint8_t { train = 0, test = 1, eval = 2 };

// Feature rows for a list of pairs at one prediction year. A plain matrix
// carries only features; a dataset additionally carries labels (and then
// future_citations/roles are parallel to rows). One binary format serves
// both, distinguished by a flags bit.
struct FeatureMatrix {
  int year = 0;
  uint64_t layout_checksum = 0;
  std::vector<std::pair<int32_t, int32_t>> pairs;
  std::vector<double> values;  // rows() * kNumFeatures, row-major

  // label block (present iff has_labels())
  std::vector<int64_t> future_citations;
  std::vector<uint8_t> labels;
  std::vector<uint8_t> roles;
  int delta = 0;
  int64_t ir = 0;
  uint64_t seed = 0;
  std::optional<std::pair<int64_t, int64_t>> band;  // conditioning band [low, high]

  size_t rows() const { return pairs.size(); }
  bool has_labels() const { return !labels.empty(); }
  double* row(size_t i) { return values.data() + i * kNumFeatures; }
  const double* row(size_t i) const { return values.data() + i * kNumFeatures; }

  // Rows with the given role, in file order.
  std::vector<uint32_t> rows_with_role(RowRole role) const;

  void save(const std::filesystem::path& path, const ArtifactMeta& meta) const;
  static FeatureMatrix load(const std::filesystem::path& path, ArtifactMeta* meta_out = nullptr);
  void export_tsv(std::ostream& out) const;
};

FeatureMatrix make_feature_matrix(const SnapshotTrio& trio, std::vector<std::pair<int32_t, int32_t>> pairs,
                                  int workers = 1);

// Copies the given rows (in the given order) into a fresh matrix, label
// block included when present. Throws on out-of-range indices.
FeatureMatrix gather_rows(const FeatureMatrix& src, const std::vector<uint32_t>& rows);

}  // namespace kgcast
