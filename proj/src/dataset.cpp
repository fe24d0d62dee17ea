#include "foilgan/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "foilgan/numfmt.hpp"
#include "foilgan/parallel.hpp"
#include "foilgan/rng.hpp"

namespace foilgan {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kMetaMagic = "foilgan-dataset";

std::string table_header() {
  std::string h = "code,cl";
  for (std::size_t i = 1; i <= kSurfacePoints; ++i) h += ",x" + std::to_string(i);
  for (std::size_t i = 1; i <= kSurfacePoints; ++i) h += ",y" + std::to_string(i);
  return h;
}

LabelRange label_range(const std::vector<LabeledAirfoil>& records) {
  LabelRange r{records.front().cl, records.front().cl};
  for (const auto& rec : records) {
    r.min = std::min(r.min, rec.cl);
    r.max = std::max(r.max, rec.cl);
  }
  return r;
}

}  // namespace

std::vector<Naca4Code> all_naca4_codes() {
  std::vector<Naca4Code> codes;
  codes.reserve(9900);
  for (int n = 0; n <= 9999; ++n) {
    if (n % 100 == 0) continue;
    codes.push_back(Naca4Code::from_number(n));
  }
  return codes;
}

DatasetManifest build_dataset(std::span<const Naca4Code> codes, const FlowCondition& cond, const ClBackend& backend,
                              unsigned jobs, BuildStats* stats) {
  if (codes.empty()) throw std::invalid_argument("build_dataset needs at least one code");
  cond.validate();

  std::vector<std::optional<LabeledAirfoil>> kept(codes.size());
  std::vector<ClResult> results(codes.size());
  parallel_for(codes.size(), jobs, [&](std::size_t i) {
    AirfoilShape shape = naca4_surface(codes[i]);
    results[i] = backend.evaluate(shape, cond);
    if (results[i].converged() && *results[i].cl >= kMinLabel && *results[i].cl <= kMaxLabel) {
      kept[i] = LabeledAirfoil{codes[i], std::move(shape), *results[i].cl};
    }
  });

  BuildStats local;
  DatasetManifest manifest;
  manifest.flow = cond;
  manifest.solver_id = backend.id();
  for (std::size_t i = 0; i < codes.size(); ++i) {
    ++local.evaluated;
    if (!results[i].converged()) {
      ++local.non_converged;
    } else if (*results[i].cl < kMinLabel) {
      ++local.below_range;
    } else if (*results[i].cl > kMaxLabel) {
      ++local.above_range;
    }
    if (kept[i]) manifest.records.push_back(std::move(*kept[i]));
  }
  local.retained = manifest.records.size();
  if (stats) *stats = local;
  if (manifest.records.empty()) throw EmptyDatasetError("empty dataset: no code survived CL filtering");
  manifest.normalization = label_range(manifest.records);
  return manifest;
}

std::vector<HistogramBin> cl_histogram(const DatasetManifest& manifest, double bin_width) {
  if (manifest.records.empty()) throw std::invalid_argument("histogram of an empty manifest");
  if (!(bin_width > 0.0)) throw std::invalid_argument("bin width must be positive");
  const auto n_bins = static_cast<std::size_t>(std::ceil((kMaxLabel - kMinLabel) / bin_width - 1e-9));
  std::vector<HistogramBin> bins(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    bins[b] = {kMinLabel + bin_width * static_cast<double>(b),
               std::min(kMaxLabel, kMinLabel + bin_width * static_cast<double>(b + 1)), 0};
  }
  for (const auto& rec : manifest.records) {
    // Nudge so values on an edge land in the bin they open (0.3 / 0.1 = 2.999...).
    auto b = static_cast<std::size_t>(std::floor((rec.cl - kMinLabel) / bin_width + 1e-9));
    if (rec.cl < kMinLabel) b = 0;
    bins[std::min(b, n_bins - 1)].count++;
  }
  return bins;
}

fs::path metadata_path(const fs::path& table_path) {
  fs::path p = table_path;
  p += ".meta";
  return p;
}

void save(const DatasetManifest& manifest, const fs::path& table_path) {
  {
    std::ofstream meta(metadata_path(table_path));
    if (!meta) throw DatasetError("cannot write " + metadata_path(table_path).string());
    meta << kMetaMagic << '\n'
         << "schema_version=" << kDatasetSchemaVersion << '\n'
         << "solver_id=" << manifest.solver_id << '\n'
         << "alpha=" << format_double(manifest.flow.alpha_deg) << '\n'
         << "reynolds=" << format_double(manifest.flow.reynolds) << '\n'
         << "record_count=" << manifest.records.size() << '\n'
         << "cl_min=" << format_double(manifest.normalization.min) << '\n'
         << "cl_max=" << format_double(manifest.normalization.max) << '\n';
    if (!meta) throw DatasetError("failed writing " + metadata_path(table_path).string());
  }
  std::ofstream table(table_path);
  if (!table) throw DatasetError("cannot write " + table_path.string());
  table << table_header() << '\n';
  std::string line;
  for (const auto& rec : manifest.records) {
    if (rec.shape.size() != kSurfacePoints) throw DatasetError("record shape is not " + std::to_string(kShapeDim) + "-dimensional");
    line = rec.code.str();
    line += ',';
    line += format_double(rec.cl);
    for (double v : rec.shape.coords()) {
      line += ',';
      line += format_double(v);
    }
    line += '\n';
    table << line;
  }
  if (!table) throw DatasetError("failed writing " + table_path.string());
}

DatasetManifest load(const fs::path& table_path) {
  std::ifstream meta(metadata_path(table_path));
  if (!meta) throw DatasetError("cannot open " + metadata_path(table_path).string());
  std::string line;
  if (!std::getline(meta, line) || line != kMetaMagic) {
    throw DatasetSchemaError("not a dataset metadata file (bad magic): " + metadata_path(table_path).string());
  }
  std::map<std::string, std::string> fields;
  while (std::getline(meta, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DatasetSchemaError("malformed metadata line: " + line);
    fields[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto field = [&](const std::string& key) -> const std::string& {
    const auto it = fields.find(key);
    if (it == fields.end()) throw DatasetSchemaError("metadata missing key '" + key + "'");
    return it->second;
  };
  auto number = [&](const std::string& key) {
    double v = 0.0;
    if (!try_parse_double(field(key), v)) throw DatasetSchemaError("metadata key '" + key + "' is not a number");
    return v;
  };
  if (field("schema_version") != std::to_string(kDatasetSchemaVersion)) {
    throw DatasetSchemaError("unsupported dataset schema version " + field("schema_version"));
  }

  DatasetManifest manifest;
  manifest.solver_id = field("solver_id");
  manifest.flow = {number("alpha"), number("reynolds")};
  manifest.normalization = {number("cl_min"), number("cl_max")};
  const double declared = number("record_count");
  if (!(declared >= 1.0) || declared != std::floor(declared)) throw DatasetSchemaError("invalid record_count");
  const auto count = static_cast<std::size_t>(declared);

  std::ifstream table(table_path, std::ios::binary);
  if (!table) throw DatasetError("cannot open " + table_path.string());
  std::stringstream buffer;
  buffer << table.rdbuf();
  const std::string text = buffer.str();

  std::size_t pos = text.find('\n');
  if (pos == std::string::npos) throw DatasetTruncatedError("dataset table has no complete header line");
  if (std::string_view(text).substr(0, pos) != table_header()) throw DatasetSchemaError("unexpected dataset table header");
  ++pos;

  manifest.records.reserve(count);
  std::vector<double> coords(kShapeDim);
  while (pos < text.size()) {
    const std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) {
      throw DatasetTruncatedError("dataset table ends mid-record at record " + std::to_string(manifest.records.size() + 1));
    }
    const std::string_view row(text.data() + pos, eol - pos);
    pos = eol + 1;

    std::vector<std::string_view> cells;
    cells.reserve(kShapeDim + 2);
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = row.find(',', start);
      cells.push_back(row.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cells.size() < kShapeDim + 2) {
      throw DatasetTruncatedError("dataset record " + std::to_string(manifest.records.size() + 1) + " has too few fields");
    }
    if (cells.size() > kShapeDim + 2) throw DatasetSchemaError("dataset record has too many fields");

    double cl = 0.0;
    if (!try_parse_double(cells[1], cl)) throw DatasetSchemaError("bad cl value '" + std::string(cells[1]) + "'");
    for (std::size_t i = 0; i < kShapeDim; ++i) {
      if (!try_parse_double(cells[i + 2], coords[i])) throw DatasetSchemaError("bad coordinate value");
    }
    std::optional<Naca4Code> code;
    try {
      code = Naca4Code::parse(cells[0]);
    } catch (const std::invalid_argument& e) {
      throw DatasetSchemaError(e.what());
    }
    manifest.records.push_back({*code, AirfoilShape(coords), cl});
  }

  if (manifest.records.size() < count) {
    throw DatasetTruncatedError("dataset table holds " + std::to_string(manifest.records.size()) + " of " +
                                std::to_string(count) + " declared records");
  }
  if (manifest.records.size() > count) throw DatasetSchemaError("dataset table holds more records than declared");
  return manifest;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng = make_rng(seed, SeedStream::shuffle);
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

}  // namespace foilgan
