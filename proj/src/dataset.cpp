#include "credit_transfer/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "credit_transfer/errors.hpp"
#include "credit_transfer/format.hpp"
#include "credit_transfer/random.hpp"

namespace credit_transfer {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

bool parse_number(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto result = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return result.ec == std::errc() && result.ptr == cell.data() + cell.size() && std::isfinite(out);
}

}  // namespace

std::string_view to_string(Subpopulation tag) {
  switch (tag) {
    case Subpopulation::Source: return "source";
    case Subpopulation::Target: return "target";
    case Subpopulation::Pooled: return "pooled";
  }
  return "pooled";
}

LabeledSample::LabeledSample(Eigen::MatrixXd features, Eigen::VectorXd labels,
                             std::vector<std::string> feature_names, Subpopulation tag)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)),
      tag_(tag) {
  if (features_.rows() == 0) throw DataError("empty dataset");
  if (labels_.size() != features_.rows())
    throw std::invalid_argument("LabeledSample: label count does not match row count");
  if (static_cast<Eigen::Index>(feature_names_.size()) != features_.cols())
    throw std::invalid_argument("LabeledSample: feature name count does not match column count");
  for (Eigen::Index i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != 0.0 && labels_[i] != 1.0)
      throw DataError("label in row " + std::to_string(i + 1) + " is not 0 or 1");
  }
}

CreditRecord LabeledSample::record(Eigen::Index row) const {
  if (row < 0 || row >= size()) throw std::out_of_range("LabeledSample::record: row out of range");
  return {features_.row(row).transpose(), static_cast<int>(labels_[row])};
}

Eigen::Index LabeledSample::count_label(int label) const {
  return (labels_.array() == static_cast<double>(label)).count();
}

Eigen::Index LabeledSample::column(std::string_view name) const {
  const auto it = std::find(feature_names_.begin(), feature_names_.end(), name);
  if (it == feature_names_.end()) throw DataError("unknown column '" + std::string(name) + "'");
  return std::distance(feature_names_.begin(), it);
}

LabeledSample LabeledSample::rows(const std::vector<Eigen::Index>& indices,
                                  Subpopulation tag) const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(indices.size()), dimension());
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index k = 0; k < x.rows(); ++k) {
    const Eigen::Index r = indices[static_cast<std::size_t>(k)];
    if (r < 0 || r >= size()) throw std::out_of_range("LabeledSample::rows: row out of range");
    x.row(k) = features_.row(r);
    y[k] = labels_[r];
  }
  return {std::move(x), std::move(y), feature_names_, tag};
}

LabeledSample LabeledSample::without_column(Eigen::Index col) const {
  if (col < 0 || col >= dimension())
    throw std::out_of_range("LabeledSample::without_column: column out of range");
  Eigen::MatrixXd x(size(), dimension() - 1);
  x.leftCols(col) = features_.leftCols(col);
  x.rightCols(dimension() - col - 1) = features_.rightCols(dimension() - col - 1);
  auto names = feature_names_;
  names.erase(names.begin() + col);
  return {std::move(x), labels_, std::move(names), tag_};
}

LabeledSample LabeledSample::with_tag(Subpopulation tag) const {
  return {features_, labels_, feature_names_, tag};
}

LabeledSample concatenate(const LabeledSample& first, const LabeledSample& second,
                          Subpopulation tag) {
  if (first.feature_names() != second.feature_names())
    throw std::invalid_argument("concatenate: feature sets differ");
  Eigen::MatrixXd x(first.size() + second.size(), first.dimension());
  x << first.features(), second.features();
  Eigen::VectorXd y(x.rows());
  y << first.labels(), second.labels();
  return {std::move(x), std::move(y), first.feature_names(), tag};
}

LabeledSample parse_csv(std::string_view text, std::string_view target_column,
                        std::string_view origin) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_number = 0;

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    for (auto field : split_fields(line)) header.emplace_back(field);
    break;
  }
  if (header.empty()) throw DataError(std::string(origin) + ": missing header row");

  const auto target_it = std::find(header.begin(), header.end(), target_column);
  if (target_it == header.end())
    throw DataError(std::string(origin) + ": target column '" + std::string(target_column) +
                    "' not in header");
  const auto target_index = static_cast<std::size_t>(std::distance(header.begin(), target_it));

  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != target_index) names.push_back(header[c]);

  std::vector<double> cells;
  std::vector<double> labels;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size())
      throw DataError(std::string(origin) + ": row " + std::to_string(line_number) + " has " +
                      std::to_string(fields.size()) + " cells, expected " +
                      std::to_string(header.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double value = 0.0;
      if (!parse_number(fields[c], value))
        throw DataError(std::string(origin) + ": row " + std::to_string(line_number) +
                        ", column '" + header[c] + "': cannot parse '" + std::string(fields[c]) +
                        "' as a number");
      if (c == target_index)
        labels.push_back(value);
      else
        cells.push_back(value);
    }
  }
  if (labels.empty()) throw DataError(std::string(origin) + ": empty dataset");

  const auto n = static_cast<Eigen::Index>(labels.size());
  const auto d = static_cast<Eigen::Index>(names.size());
  Eigen::MatrixXd x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                     Eigen::RowMajor>>(cells.data(), n, d);
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(labels.data(), n);
  return {std::move(x), std::move(y), std::move(names), Subpopulation::Pooled};
}

LabeledSample load_csv(const std::filesystem::path& path, std::string_view target_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), target_column, path.string());
}

void write_csv(const std::filesystem::path& path, const LabeledSample& sample,
               std::string_view target_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot write file");
  out << target_column;
  for (const auto& name : sample.feature_names()) out << ',' << name;
  out << '\n';
  for (Eigen::Index i = 0; i < sample.size(); ++i) {
    out << format_double(sample.labels()[i]);
    for (Eigen::Index j = 0; j < sample.dimension(); ++j)
      out << ',' << format_double(sample.features()(i, j));
    out << '\n';
  }
}

SubpopulationSplit split_by_account_status(const LabeledSample& sample,
                                           std::string_view split_column) {
  const Eigen::Index col = sample.column(split_column);
  std::vector<Eigen::Index> source_rows;
  std::vector<Eigen::Index> target_rows;
  for (Eigen::Index i = 0; i < sample.size(); ++i) {
    const double value = sample.features()(i, col);
    if (value < 1.0)
      throw DataError("row " + std::to_string(i + 1) + ": " + std::string(split_column) +
                      " value below 1");
    (value > 1.0 ? source_rows : target_rows).push_back(i);
  }
  if (source_rows.empty()) throw DataError("empty subpopulation: no rows with " +
                                           std::string(split_column) + " > 1");
  if (target_rows.empty()) throw DataError("empty subpopulation: no rows with " +
                                           std::string(split_column) + " = 1");
  return {sample.rows(source_rows, Subpopulation::Source).without_column(col),
          sample.rows(target_rows, Subpopulation::Target).without_column(col)};
}

LearningTestSplit draw_split(const LabeledSample& target, const SplitPlan& plan,
                             int repetition_index) {
  if (plan.repetitions < 1) throw std::invalid_argument("draw_split: repetitions must be >= 1");
  if (repetition_index < 0 || repetition_index >= plan.repetitions)
    throw std::invalid_argument("draw_split: repetition index out of range");
  if (plan.learning_size < 1 || plan.learning_size >= target.size())
    throw std::invalid_argument("draw_split: learning size must be in [1, " +
                                std::to_string(target.size()) + ")");

  SplitMix64 rng(derive_stream(plan.seed, {static_cast<std::uint64_t>(plan.learning_size),
                                           static_cast<std::uint64_t>(repetition_index)}));

  // Partial Fisher-Yates over a candidate pool; the first `take` entries are kept.
  const auto pick = [&rng](std::vector<Eigen::Index>& pool, Eigen::Index take,
                           std::vector<Eigen::Index>& chosen) {
    const auto size = pool.size();
    for (std::size_t i = 0; i < static_cast<std::size_t>(take); ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(size - i));
      std::swap(pool[i], pool[j]);
      chosen.push_back(pool[i]);
    }
  };

  std::vector<Eigen::Index> learning_rows;
  if (!plan.stratified) {
    std::vector<Eigen::Index> pool(static_cast<std::size_t>(target.size()));
    std::iota(pool.begin(), pool.end(), Eigen::Index{0});
    pick(pool, plan.learning_size, learning_rows);
  } else {
    std::vector<Eigen::Index> positives;
    std::vector<Eigen::Index> negatives;
    for (Eigen::Index i = 0; i < target.size(); ++i)
      (target.labels()[i] == 1.0 ? positives : negatives).push_back(i);
    const double share = static_cast<double>(positives.size()) / static_cast<double>(target.size());
    auto take_pos = static_cast<Eigen::Index>(std::llround(share * static_cast<double>(plan.learning_size)));
    take_pos = std::clamp<Eigen::Index>(take_pos, plan.learning_size - static_cast<Eigen::Index>(negatives.size()),
                                        static_cast<Eigen::Index>(positives.size()));
    pick(positives, take_pos, learning_rows);
    pick(negatives, plan.learning_size - take_pos, learning_rows);
  }
  std::sort(learning_rows.begin(), learning_rows.end());

  std::vector<Eigen::Index> test_rows;
  test_rows.reserve(static_cast<std::size_t>(target.size() - plan.learning_size));
  auto next = learning_rows.begin();
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    if (next != learning_rows.end() && *next == i)
      ++next;
    else
      test_rows.push_back(i);
  }

  return {target.rows(learning_rows, Subpopulation::Target),
          target.rows(test_rows, Subpopulation::Target), std::move(learning_rows),
          std::move(test_rows)};
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state) {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= 0x100000001B3ULL;
  }
  return state;
}

std::uint64_t content_hash(const LabeledSample& sample) {
  std::uint64_t h = fnv1a64({});
  const auto feed = [&h](std::string_view text) { h = fnv1a64(text, h); };
  for (const auto& name : sample.feature_names()) {
    feed(name);
    feed(",");
  }
  for (Eigen::Index i = 0; i < sample.size(); ++i) {
    feed(format_double(sample.labels()[i]));
    for (Eigen::Index j = 0; j < sample.dimension(); ++j) {
      feed(",");
      feed(format_double(sample.features()(i, j)));
    }
    feed("\n");
  }
  return h;
}

}  // namespace credit_transfer
