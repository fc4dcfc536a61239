#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "doctest.h"
#include "fgrt/data.hpp"
#include "fgrt/errors.hpp"

using namespace fgrt;

namespace {

std::filesystem::path write_temp(const std::string& name,
                                 const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("load_csv parses features and labels") {
  const auto path = write_temp("fgrt_basic.csv",
                               "a,b,label\n1,2,yes\n3,4,no\n5,6,yes\n");
  const Dataset ds = load_csv(path);
  CHECK(ds.name == "fgrt_basic");
  CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(ds.X.rows == 3);
  CHECK(ds.X.cols == 2);
  CHECK(ds.X.at(1, 0) == 3.0);
  CHECK(ds.y == std::vector<int>{0, 1, 0});  // first-appearance order
  CHECK(ds.class_names == std::vector<std::string>{"yes", "no"});
}

TEST_CASE("load_csv supports a label column in the middle") {
  const auto path = write_temp("fgrt_middle.csv",
                               "a,target,b\n1,x,2\n3,y,4\n");
  const Dataset ds = load_csv(path, std::string("target"));
  CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(ds.X.at(0, 1) == 2.0);
  CHECK(ds.class_names == std::vector<std::string>{"x", "y"});
}

TEST_CASE("load_csv reports parse errors with coordinates") {
  const auto path = write_temp("fgrt_bad.csv", "a,b,label\n1,2,x\n1,oops,y\n");
  try {
    load_csv(path);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 3") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
    CHECK(msg.find("oops") != std::string::npos);
  }
}

TEST_CASE("a sidecar manifest names the label column and class order") {
  const auto path = write_temp("fgrt_manifest.csv",
                               "a,target,b\n1,0,2\n3,1,4\n5,0,6\n");
  write_temp("fgrt_manifest.csv.manifest",
             "# dataset manifest\nlabel_column=target\nclass_names=1,0\n");
  const Dataset ds = load_csv(path);
  CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(ds.class_names == std::vector<std::string>{"1", "0"});
  CHECK(ds.y == std::vector<int>{1, 0, 1});

  // an explicit argument overrides the manifest's label column
  const Dataset overridden = load_csv(path, std::string("b"));
  CHECK(overridden.feature_names == std::vector<std::string>{"a", "target"});
  CHECK(overridden.class_names == std::vector<std::string>{"2", "4", "6"});
  std::filesystem::remove(std::filesystem::temp_directory_path() /
                          "fgrt_manifest.csv.manifest");
}

TEST_CASE("load_csv rejects missing files, columns and empty data") {
  CHECK_THROWS_AS(load_csv("/nonexistent/nope.csv"), DataError);
  const auto path = write_temp("fgrt_nocol.csv", "a,b,label\n1,2,x\n");
  CHECK_THROWS_AS(load_csv(path, std::string("missing")), DataError);
  const auto empty = write_temp("fgrt_empty.csv", "a,b,label\n");
  CHECK_THROWS_AS(load_csv(empty), DataError);
}

TEST_CASE("normalization: zero mean, unit variance, degenerate drop") {
  Matrix X(4, 3);
  const double col0[4] = {1, 2, 3, 4};
  const double col2[4] = {10, 20, 30, 40};
  for (int i = 0; i < 4; ++i) {
    X.at(i, 0) = col0[i];
    X.at(i, 1) = 7.0;  // constant
    X.at(i, 2) = col2[i];
  }
  const NormStats stats = normalize_fit(X);
  CHECK(stats.kept == std::vector<int>{0, 2});
  CHECK(stats.degenerate == std::vector<int>{1});

  const Matrix Xn = normalize_apply(X, stats);
  REQUIRE(Xn.cols == 2);
  for (std::size_t j = 0; j < 2; ++j) {
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < 4; ++i) mean += Xn.at(i, j);
    mean /= 4;
    for (std::size_t i = 0; i < 4; ++i)
      var += (Xn.at(i, j) - mean) * (Xn.at(i, j) - mean);
    var /= 4;
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(var == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("held-out rows are transformed with training stats") {
  Matrix train(3, 1), test(2, 1);
  train.at(0, 0) = 0.0;
  train.at(1, 0) = 1.0;
  train.at(2, 0) = 2.0;  // mean 1, population std sqrt(2/3)
  test.at(0, 0) = 10.0;
  test.at(1, 0) = -10.0;

  const NormStats stats = normalize_fit(train);
  const Matrix out = normalize_apply(test, stats);
  const double std = std::sqrt(2.0 / 3.0);
  CHECK(out.at(0, 0) == doctest::Approx((10.0 - 1.0) / std));
  CHECK(out.at(1, 0) == doctest::Approx((-10.0 - 1.0) / std));
}

TEST_CASE("stratified folds balance classes") {
  std::vector<int> y(100);
  for (int i = 0; i < 100; ++i) y[i] = i % 2;
  const FoldPlan plan = stratified_kfold(y, 5, 42);

  for (int fold = 0; fold < 5; ++fold) {
    int c0 = 0, c1 = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (plan.assignments[i] == fold) (y[i] == 0 ? c0 : c1)++;
    CHECK(c0 == 10);
    CHECK(c1 == 10);
  }
  CHECK(plan.small_classes.empty());
}

TEST_CASE("fold assignment is deterministic and partitions the index set") {
  std::mt19937_64 rng(5);
  std::vector<int> y(137);
  for (int& label : y) label = static_cast<int>(rng() % 3);
  const FoldPlan a = stratified_kfold(y, 5, 99);
  const FoldPlan b = stratified_kfold(y, 5, 99);
  CHECK(a.assignments == b.assignments);

  // every sample lands in exactly one fold in [0, k)
  for (int fold : a.assignments) {
    CHECK(fold >= 0);
    CHECK(fold < 5);
  }

  // per-class fold counts differ by at most one
  for (int c = 0; c < 3; ++c) {
    int counts[5] = {0, 0, 0, 0, 0};
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == c) counts[a.assignments[i]]++;
    const auto [lo, hi] = std::minmax_element(counts, counts + 5);
    CHECK(*hi - *lo <= 1);
  }
}

TEST_CASE("small classes spread across distinct folds and get flagged") {
  std::vector<int> y(23, 0);
  y[20] = y[21] = y[22] = 1;  // three samples of class 1, k = 5
  const FoldPlan plan = stratified_kfold(y, 5, 7);
  CHECK(plan.small_classes == std::vector<int>{1});
  std::set<int> folds;
  for (int i = 20; i < 23; ++i) folds.insert(plan.assignments[i]);
  CHECK(folds.size() == 3);
}

TEST_CASE("kfold rejects bad arguments") {
  std::vector<int> y{0, 1, 0, 1};
  CHECK_THROWS_AS(stratified_kfold(y, 1, 0), ConfigError);
  CHECK_THROWS_AS(stratified_kfold(y, 5, 0), ConfigError);  // k > n
}
