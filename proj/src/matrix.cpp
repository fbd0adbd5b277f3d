#include "kgcast/matrix.hpp"

#include <fstream>

#include "kgcast/binio.hpp"
#include "kgcast/errors.hpp"

namespace kgcast {

namespace {
constexpr char kMatrixMagic[9] = "KGFMAT01";
constexpr uint32_t kFlagLabels = 1u;
constexpr uint32_t kFlagBand = 2u;
}  // namespace

std::vector<uint32_t> FeatureMatrix::rows_with_role(RowRole role) const {
  std::vector<uint32_t> out;
  for (uint32_t i = 0; i < roles.size(); ++i) {
    if (roles[i] == uint8_t(role)) out.push_back(i);
  }
  return out;
}

void FeatureMatrix::save(const std::filesystem::path& path, const ArtifactMeta& meta) const {
  if (values.size() != rows() * kNumFeatures) throw ValidationError("feature matrix values/pairs size mismatch");
  if (has_labels() && (labels.size() != rows() || future_citations.size() != rows() || roles.size() != rows()))
    throw ValidationError("feature matrix label block size mismatch");

  // The slot manifest rides along in the meta block so a matrix is
  // self-describing even without the library.
  ArtifactMeta full = meta;
  {
    nlohmann::json manifest = nlohmann::json::array();
    const auto& idx = feature_index();
    for (size_t i = 0; i < idx.size(); ++i) manifest.push_back({i, idx[i].name, idx[i].formula});
    full.params["feature_index"] = std::move(manifest);
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open matrix file for writing: " + path.string());
  write_artifact_header(out, kMatrixMagic, 1, full);

  uint32_t flags = 0;
  if (has_labels()) flags |= kFlagLabels;
  if (band) flags |= kFlagBand;
  write_le<uint32_t>(out, flags);
  write_le<int32_t>(out, year);
  write_le<uint64_t>(out, layout_checksum);
  write_le<uint64_t>(out, rows());
  write_le<uint64_t>(out, kNumFeatures);
  if (has_labels()) {
    write_le<int32_t>(out, delta);
    write_le<int64_t>(out, ir);
    write_le<uint64_t>(out, seed);
    if (band) {
      write_le<int64_t>(out, band->first);
      write_le<int64_t>(out, band->second);
    }
  }
  for (auto& [u, v] : pairs) {
    write_le<int32_t>(out, u);
    write_le<int32_t>(out, v);
  }
  for (double x : values) write_le<double>(out, x);
  if (has_labels()) {
    for (int64_t c : future_citations) write_le<int64_t>(out, c);
    out.write(reinterpret_cast<const char*>(labels.data()), std::streamsize(labels.size()));
    out.write(reinterpret_cast<const char*>(roles.data()), std::streamsize(roles.size()));
  }
  if (!out) throw ValidationError("I/O error while writing matrix file: " + path.string());
}

FeatureMatrix FeatureMatrix::load(const std::filesystem::path& path, ArtifactMeta* meta_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open matrix file: " + path.string());
  auto [version, meta] = read_artifact_header(in, kMatrixMagic, 1);
  if (meta_out) *meta_out = meta;

  FeatureMatrix m;
  const uint32_t flags = read_le<uint32_t>(in);
  m.year = read_le<int32_t>(in);
  m.layout_checksum = read_le<uint64_t>(in);
  const uint64_t n_rows = read_le<uint64_t>(in);
  const uint64_t n_cols = read_le<uint64_t>(in);
  if (n_cols != kNumFeatures)
    throw IntegrityError("matrix file has " + std::to_string(n_cols) + " columns, expected 141");
  if (m.layout_checksum != feature_layout_checksum())
    throw IntegrityError("matrix feature layout checksum does not match this build's layout");
  if (flags & kFlagLabels) {
    m.delta = read_le<int32_t>(in);
    m.ir = read_le<int64_t>(in);
    m.seed = read_le<uint64_t>(in);
    if (flags & kFlagBand) {
      int64_t low = read_le<int64_t>(in);
      int64_t high = read_le<int64_t>(in);
      m.band = {low, high};
    }
  }
  m.pairs.resize(n_rows);
  for (auto& [u, v] : m.pairs) {
    u = read_le<int32_t>(in);
    v = read_le<int32_t>(in);
  }
  m.values.resize(n_rows * kNumFeatures);
  for (double& x : m.values) x = read_le<double>(in);
  if (flags & kFlagLabels) {
    m.future_citations.resize(n_rows);
    for (int64_t& c : m.future_citations) c = read_le<int64_t>(in);
    m.labels.resize(n_rows);
    in.read(reinterpret_cast<char*>(m.labels.data()), std::streamsize(n_rows));
    m.roles.resize(n_rows);
    in.read(reinterpret_cast<char*>(m.roles.data()), std::streamsize(n_rows));
    if (!in) throw IntegrityError("matrix file truncated in label block: " + path.string());
  }
  return m;
}

void FeatureMatrix::export_tsv(std::ostream& out) const {
  out << "u\tv";
  if (has_labels()) out << "\tfuture_citations\tlabel\trole";
  for (const FeatureSlot& s : feature_index()) out << '\t' << s.name;
  out << '\n';
  for (size_t i = 0; i < rows(); ++i) {
    out << pairs[i].first << '\t' << pairs[i].second;
    if (has_labels())
      out << '\t' << future_citations[i] << '\t' << int(labels[i]) << '\t' << int(roles[i]);
    const double* r = row(i);
    for (size_t j = 0; j < kNumFeatures; ++j) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", r[j]);
      out << '\t' << buf;
    }
    out << '\n';
  }
}

FeatureMatrix make_feature_matrix(const SnapshotTrio& trio, std::vector<std::pair<int32_t, int32_t>> pairs,
                                  int workers) {
  FeatureMatrix m;
  m.year = trio.year;
  m.layout_checksum = feature_layout_checksum();
  m.values = compute_feature_rows(trio, pairs, workers);
  m.pairs = std::move(pairs);
  return m;
}

FeatureMatrix gather_rows(const FeatureMatrix& src, const std::vector<uint32_t>& rows) {
  FeatureMatrix out;
  out.year = src.year;
  out.layout_checksum = src.layout_checksum;
  out.delta = src.delta;
  out.ir = src.ir;
  out.seed = src.seed;
  out.band = src.band;
  out.pairs.reserve(rows.size());
  out.values.reserve(rows.size() * kNumFeatures);
  for (uint32_t r : rows) {
    if (r >= src.rows())
      throw ValidationError("row index " + std::to_string(r) + " out of range (" + std::to_string(src.rows()) +
                            " rows)");
    out.pairs.push_back(src.pairs[r]);
    const double* v = src.row(r);
    out.values.insert(out.values.end(), v, v + kNumFeatures);
    if (src.has_labels()) {
      out.future_citations.push_back(src.future_citations[r]);
      out.labels.push_back(src.labels[r]);
      out.roles.push_back(src.roles[r]);
    }
  }
  return out;
}

}  // namespace kgcast
