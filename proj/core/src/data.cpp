#include "fgrt/data.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "fgrt/errors.hpp"

namespace fgrt {
namespace {

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size();
}

// Sidecar "<data>.manifest" with key=value lines; recognized keys are
// label_column and class_names (comma-separated, fixes the id order).
struct DatasetManifest {
  std::optional<std::string> label_column;
  std::vector<std::string> class_names;
};

DatasetManifest read_manifest(const std::filesystem::path& data_path) {
  DatasetManifest manifest;
  std::ifstream in(data_path.string() + ".manifest");
  if (!in) return manifest;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "label_column") {
      manifest.label_column = value;
    } else if (key == "class_names") {
      manifest.class_names = split_csv_line(value);
    }
  }
  return manifest;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path,
                 const std::optional<std::string>& label_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty data file: " + path.string());
  const std::vector<std::string> header = split_csv_line(line);
  if (header.empty()) throw DataError("missing header row: " + path.string());

  const DatasetManifest manifest = read_manifest(path);
  const std::optional<std::string> wanted_label =
      label_column ? label_column : manifest.label_column;

  std::size_t label_idx = header.size() - 1;
  if (wanted_label) {
    const auto it = std::find(header.begin(), header.end(), *wanted_label);
    if (it == header.end())
      throw DataError("label column '" + *wanted_label + "' not found in " +
                      path.string());
    label_idx = static_cast<std::size_t>(it - header.begin());
  }

  Dataset ds;
  ds.name = path.stem().string();
  std::unordered_map<std::string, int> preset_ids;
  // The manifest's class order applies only to the manifest's own label
  // column; an explicit override selects a different target entirely.
  if (!label_column || label_column == manifest.label_column) {
    for (const std::string& name : manifest.class_names) {
      preset_ids.emplace(name, static_cast<int>(ds.class_names.size()));
      ds.class_names.push_back(name);
    }
  }
  for (std::size_t i = 0; i < header.size(); ++i)
    if (i != label_idx) ds.feature_names.push_back(header[i]);
  const std::size_t m = ds.feature_names.size();
  if (m == 0) throw DataError("no feature columns in " + path.string());

  std::vector<double> values;
  std::unordered_map<std::string, int> class_ids = std::move(preset_ids);
  std::size_t row_number = 1;  // header was row 1
  while (std::getline(in, line)) {
    ++row_number;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      std::ostringstream msg;
      msg << path.string() << ": row " << row_number << " has " << cells.size()
          << " cells, expected " << header.size();
      throw DataError(msg.str());
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i == label_idx) continue;
      double v = 0.0;
      if (!parse_double(cells[i], v)) {
        std::ostringstream msg;
        msg << path.string() << ": non-numeric value '" << cells[i]
            << "' at row " << row_number << ", column " << (i + 1) << " ('"
            << header[i] << "')";
        throw DataError(msg.str());
      }
      values.push_back(v);
    }
    const std::string& label = cells[label_idx];
    auto [it, inserted] =
        class_ids.emplace(label, static_cast<int>(ds.class_names.size()));
    if (inserted) ds.class_names.push_back(label);
    ds.y.push_back(it->second);
  }

  if (ds.y.empty()) throw DataError("no data rows in " + path.string());
  std::vector<int> seen(ds.class_names.size(), 0);
  for (int label : ds.y) seen[label] = 1;
  for (std::size_t c = 0; c < seen.size(); ++c)
    if (!seen[c])
      throw DataError("manifest class '" + ds.class_names[c] +
                      "' has no samples in " + path.string());
  ds.X.rows = ds.y.size();
  ds.X.cols = m;
  ds.X.values = std::move(values);
  return ds;
}

NormStats normalize_fit(const Matrix& X) {
  if (X.rows == 0) throw DataError("normalize_fit: empty matrix");
  NormStats stats;
  stats.mean.resize(X.cols);
  stats.stddev.resize(X.cols);
  for (std::size_t j = 0; j < X.cols; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i) sum += X.at(i, j);
    const double mean = sum / static_cast<double>(X.rows);
    double sq = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i) {
      const double dev = X.at(i, j) - mean;
      sq += dev * dev;
    }
    const double stddev = std::sqrt(sq / static_cast<double>(X.rows));
    stats.mean[j] = mean;
    stats.stddev[j] = stddev;
    if (stddev > 0.0)
      stats.kept.push_back(static_cast<int>(j));
    else
      stats.degenerate.push_back(static_cast<int>(j));
  }
  return stats;
}

Matrix normalize_apply(const Matrix& X, const NormStats& stats) {
  if (X.cols != stats.mean.size())
    throw DataError("normalize_apply: column count does not match stats");
  Matrix out(X.rows, stats.kept.size());
  for (std::size_t i = 0; i < X.rows; ++i) {
    for (std::size_t jj = 0; jj < stats.kept.size(); ++jj) {
      const int j = stats.kept[jj];
      out.at(i, jj) = (X.at(i, j) - stats.mean[j]) / stats.stddev[j];
    }
  }
  return out;
}

FoldPlan stratified_kfold(std::span<const int> y, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("stratified_kfold: k must be >= 2");
  if (static_cast<std::size_t>(k) > y.size())
    throw ConfigError("stratified_kfold: k exceeds the sample count");

  int n_classes = 0;
  for (int label : y) n_classes = std::max(n_classes, label + 1);

  std::vector<std::vector<int>> by_class(n_classes);
  for (std::size_t i = 0; i < y.size(); ++i)
    by_class[y[i]].push_back(static_cast<int>(i));
  for (const auto& members : by_class)
    if (members.empty())
      throw ConfigError("stratified_kfold: class ids must be dense");

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(y.size(), 0);

  // Fisher-Yates with rejection sampling on the raw generator output:
  // mt19937_64 is bit-exact across standard libraries, so fold plans are
  // reproducible everywhere (std::shuffle is implementation-defined).
  std::mt19937_64 rng(seed);
  auto bounded = [&rng](std::uint64_t n) {
    const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
    std::uint64_t draw;
    do {
      draw = rng();
    } while (draw >= limit);
    return draw % n;
  };

  int start = 0;  // rotate the first fold per class so fold sizes stay even
  for (int c = 0; c < n_classes; ++c) {
    std::vector<int>& members = by_class[c];
    for (std::size_t i = members.size(); i > 1; --i)
      std::swap(members[i - 1], members[bounded(i)]);
    if (members.size() < static_cast<std::size_t>(k))
      plan.small_classes.push_back(c);
    for (std::size_t i = 0; i < members.size(); ++i)
      plan.assignments[members[i]] =
          static_cast<int>((i + static_cast<std::size_t>(start)) % k);
    start = static_cast<int>((start + members.size()) % k);
  }
  return plan;
}

}  // namespace fgrt
