#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "credit_transfer/dataset.hpp"
#include "credit_transfer/errors.hpp"

using namespace credit_transfer;

namespace {

const std::filesystem::path kGerman = std::filesystem::path(CT_DATA_DIR) / "german_credit.csv";

LabeledSample toy(int rows, std::uint64_t salt = 0) {
  Eigen::MatrixXd x(rows, 2);
  Eigen::VectorXd y(rows);
  for (int i = 0; i < rows; ++i) {
    x(i, 0) = i;
    x(i, 1) = static_cast<double>((i * 7 + salt) % 5);
    y[i] = (i % 3 == 0) ? 1.0 : 0.0;
  }
  return {x, y, {"a", "b"}, Subpopulation::Target};
}

}  // namespace

TEST_CASE("German credit file: 1000 records, 700 creditworthy") {
  const auto sample = load_csv(kGerman, "kredit");
  CHECK(sample.size() == 1000);
  CHECK(sample.dimension() == 20);
  CHECK(sample.count_label(1) == 700);
  CHECK(sample.count_label(0) == 300);
  CHECK(sample.feature_names().front() == "laufkont");
}

TEST_CASE("account status separates 726 customers from 274 non-customers") {
  const auto parts = split_by_account_status(load_csv(kGerman, "kredit"), "laufkont");
  CHECK(parts.source.size() == 726);
  CHECK(parts.target.size() == 274);
  CHECK(parts.source.dimension() == 19);
  CHECK(parts.target.feature_names() == parts.source.feature_names());
  CHECK(std::find(parts.source.feature_names().begin(), parts.source.feature_names().end(),
                  "laufkont") == parts.source.feature_names().end());
  CHECK(parts.source.subpopulation() == Subpopulation::Source);
  CHECK(parts.target.subpopulation() == Subpopulation::Target);
}

TEST_CASE("parse_csv keeps exact cell values") {
  const auto s = parse_csv("y,u,v\n1,0.5,-2\n0,3,1e-3\n1, 7 ,+4\n", "y");
  REQUIRE(s.size() == 3);
  CHECK(s.feature_names() == std::vector<std::string>{"u", "v"});
  CHECK(s.features()(0, 0) == 0.5);
  CHECK(s.features()(0, 1) == -2.0);
  CHECK(s.features()(1, 1) == 1e-3);
  CHECK(s.features()(2, 0) == 7.0);
  CHECK(s.features()(2, 1) == 4.0);
  CHECK(s.labels()[0] == 1.0);
  CHECK(s.labels()[1] == 0.0);
  CHECK(s.record(2).label == 1);
  CHECK(s.record(2).features.size() == 2);
}

TEST_CASE("parse_csv error paths") {
  CHECK_THROWS_WITH_AS(parse_csv("y,u\n", "y"), doctest::Contains("empty dataset"), DataError);
  CHECK_THROWS_WITH_AS(parse_csv("y,u\n1,2\n", "z"), doctest::Contains("target column"), DataError);
  CHECK_THROWS_WITH_AS(parse_csv("y,u\n1,2\n0,abc\n", "y"),
                       doctest::Contains("row 3, column 'u'"), DataError);
  CHECK_THROWS_WITH_AS(parse_csv("y,u\n1,2,3\n", "y"), doctest::Contains("cells"), DataError);
  CHECK_THROWS_WITH_AS(parse_csv("y,u\n2,1\n", "y"), doctest::Contains("not 0 or 1"), DataError);
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", "y"), DataError);
}

TEST_CASE("write_csv round-trips through load_csv") {
  const auto s = toy(9);
  const auto path = std::filesystem::temp_directory_path() / "ct_roundtrip.csv";
  write_csv(path, s, "label");
  const auto back = load_csv(path, "label");
  CHECK(back.features() == s.features());
  CHECK(back.labels() == s.labels());
  CHECK(back.feature_names() == s.feature_names());
  std::filesystem::remove(path);
}

TEST_CASE("split rule on a 4-row toy sample") {
  Eigen::MatrixXd x(4, 2);
  x << 1, 10, 2, 20, 1, 30, 3, 40;
  const LabeledSample s(x, Eigen::Vector4d(1, 0, 0, 1), {"k", "v"});
  const auto parts = split_by_account_status(s, "k");
  REQUIRE(parts.source.size() == 2);
  REQUIRE(parts.target.size() == 2);
  CHECK(parts.source.features()(0, 0) == 20);
  CHECK(parts.source.features()(1, 0) == 40);
  CHECK(parts.target.features()(0, 0) == 10);
  CHECK(parts.target.features()(1, 0) == 30);
  CHECK(parts.source.dimension() == 1);
}

TEST_CASE("split rule error paths") {
  Eigen::MatrixXd ones(3, 2);
  ones << 1, 0, 1, 1, 1, 2;
  const LabeledSample all_target(ones, Eigen::Vector3d(1, 0, 1), {"k", "v"});
  CHECK_THROWS_WITH_AS(split_by_account_status(all_target, "k"),
                       doctest::Contains("empty subpopulation"), DataError);
  CHECK_THROWS_AS(split_by_account_status(all_target, "missing"), DataError);
  Eigen::MatrixXd low(2, 1);
  low << 0.5, 2;
  const LabeledSample below(low, Eigen::Vector2d(1, 0), {"k"});
  CHECK_THROWS_WITH_AS(split_by_account_status(below, "k"), doctest::Contains("below 1"), DataError);
}

TEST_CASE("draw_split partitions the target deterministically") {
  const auto target = split_by_account_status(load_csv(kGerman, "kredit"), "laufkont").target;
  const SplitPlan plan{200, 50, 42, false};
  for (int rep : {0, 17, 49}) {
    const auto a = draw_split(target, plan, rep);
    const auto b = draw_split(target, plan, rep);
    CHECK(a.learning.size() == 200);
    CHECK(a.test.size() == 74);
    CHECK(a.learning_rows == b.learning_rows);
    CHECK(a.learning.features() == b.learning.features());

    std::set<Eigen::Index> all(a.learning_rows.begin(), a.learning_rows.end());
    for (auto r : a.test_rows) CHECK(all.insert(r).second);
    CHECK(all.size() == 274);
    CHECK(a.learning.count_label(1) + a.test.count_label(1) == target.count_label(1));
    CHECK(a.learning.count_label(0) + a.test.count_label(0) == target.count_label(0));
  }
}

TEST_CASE("draw_split property: every row lands in exactly one side") {
  for (int rows = 5; rows < 40; rows += 3) {
    const auto target = toy(rows);
    for (Eigen::Index n = 1; n < rows; n += 2) {
      for (bool stratified : {false, true}) {
        const SplitPlan plan{n, 3, static_cast<std::uint64_t>(rows * 131 + n), stratified};
        const auto split = draw_split(target, plan, 2);
        REQUIRE(static_cast<Eigen::Index>(split.learning_rows.size()) == n);
        std::vector<int> seen(static_cast<std::size_t>(rows), 0);
        for (auto r : split.learning_rows) ++seen[static_cast<std::size_t>(r)];
        for (auto r : split.test_rows) ++seen[static_cast<std::size_t>(r)];
        for (int s : seen) CHECK(s == 1);
      }
    }
  }
}

TEST_CASE("stratified draws keep the label ratio") {
  const auto target = toy(30);  // 10 positives, 20 negatives
  const auto split = draw_split(target, SplitPlan{15, 1, 5, true}, 0);
  CHECK(split.learning.count_label(1) == 5);
  CHECK(split.learning.count_label(0) == 10);
}

TEST_CASE("neighbouring seeds give different partitions (frozen fixture)") {
  const auto target = toy(12);
  const auto a = draw_split(target, SplitPlan{5, 1, 42, false}, 0);
  const auto b = draw_split(target, SplitPlan{5, 1, 43, false}, 0);
  CHECK(a.learning_rows == std::vector<Eigen::Index>({0, 1, 3, 6, 10}));
  CHECK(b.learning_rows == std::vector<Eigen::Index>({3, 4, 5, 10, 11}));
  CHECK(a.learning_rows != b.learning_rows);
}

TEST_CASE("draw_split preconditions") {
  const auto target = toy(10);
  CHECK_THROWS_AS(draw_split(target, SplitPlan{10, 1, 1, false}, 0), std::invalid_argument);
  CHECK_THROWS_AS(draw_split(target, SplitPlan{0, 1, 1, false}, 0), std::invalid_argument);
  CHECK_THROWS_AS(draw_split(target, SplitPlan{3, 2, 1, false}, 2), std::invalid_argument);
  CHECK_THROWS_AS(draw_split(target, SplitPlan{3, 2, 1, false}, -1), std::invalid_argument);
}

TEST_CASE("content hash tracks content") {
  CHECK(content_hash(toy(8)) == content_hash(toy(8)));
  CHECK(content_hash(toy(8)) != content_hash(toy(8, 1)));
  CHECK(fnv1a64("") == 0xCBF29CE484222325ULL);
  CHECK(fnv1a64("a") == 0xAF63DC4C8601EC8CULL);
}
