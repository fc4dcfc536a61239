#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fgrt/errors.hpp"
#include "fgrt/eval.hpp"
#include "fgrt/inference.hpp"
#include "fgrt/model_io.hpp"

using namespace fgrt;

TEST_CASE("well-separated gaussian classes cross-validate above 90%") {
  const Dataset ds = make_gaussian_dataset(178, 13, 3, 4.0, 1234);
  FitOptions options;
  options.seed = 42;
  const EvalReport report = cross_validate(ds, options, 5);
  CHECK(report.mean_accuracy > 0.90);
  for (const FoldResult& fr : report.folds)
    CHECK(fr.num_rules <= options.tree.max_rules);
}

TEST_CASE("permuted labels score near chance") {
  Dataset ds = make_gaussian_dataset(300, 6, 3, 4.0, 99);
  std::mt19937_64 rng(7);
  std::shuffle(ds.y.begin(), ds.y.end(), rng);
  FitOptions options;
  options.seed = 42;
  const EvalReport report = cross_validate(ds, options, 5);
  CHECK(report.mean_accuracy > 1.0 / 3.0 - 0.10);
  CHECK(report.mean_accuracy < 1.0 / 3.0 + 0.10);
}

TEST_CASE("accuracy equals an independent recount of correct predictions") {
  const Dataset ds = make_gaussian_dataset(120, 4, 2, 2.0, 55);
  FitOptions options;
  options.seed = 9;
  const int folds = 4;
  const EvalReport report = cross_validate(ds, options, folds);

  // recount fold 0 from scratch
  const FoldPlan plan = stratified_kfold(ds.y, folds, options.seed);
  std::vector<int> train_rows, test_rows;
  for (std::size_t i = 0; i < ds.y.size(); ++i)
    (plan.assignments[i] == 0 ? test_rows : train_rows).push_back(i);
  Matrix X_train(train_rows.size(), ds.X.cols);
  std::vector<int> y_train;
  for (std::size_t r = 0; r < train_rows.size(); ++r) {
    for (std::size_t j = 0; j < ds.X.cols; ++j)
      X_train.at(r, j) = ds.X.at(train_rows[r], j);
    y_train.push_back(ds.y[train_rows[r]]);
  }
  options.dataset_name = ds.name;
  const FitResult fit =
      fit_model(X_train, y_train, ds.feature_names, ds.class_names, options);
  int correct = 0;
  for (int row : test_rows)
    if (classify(fit.model, ds.X.row(row)).predicted_class == ds.y[row])
      ++correct;
  CHECK(report.folds[0].accuracy ==
        static_cast<double>(correct) / test_rows.size());
}

TEST_CASE("per-axis sweep produces one report per axis value") {
  const Dataset ds = make_gaussian_dataset(100, 4, 2, 3.0, 3);
  FitOptions options;
  options.seed = 1;
  SweepAxes axes;
  axes.max_rules = {5, 10, 15};
  const auto reports = sweep(ds, options, axes, 3);
  REQUIRE(reports.size() == 3);
  CHECK(reports[0].cell == "max_rules=5");
  CHECK(reports[2].cell == "max_rules=15");
}

TEST_CASE("cartesian sweep crosses the axes") {
  const Dataset ds = make_gaussian_dataset(80, 3, 2, 3.0, 4);
  FitOptions options;
  options.seed = 1;
  SweepAxes axes;
  axes.cartesian = true;
  axes.max_rules = {5, 10};
  axes.min_gain_theta = {0.0, 0.01, 0.02};
  const auto reports = sweep(ds, options, axes, 3);
  CHECK(reports.size() == 6);
}

TEST_CASE("sweep validates axis ranges") {
  const Dataset ds = make_gaussian_dataset(60, 3, 2, 3.0, 4);
  FitOptions options;
  SweepAxes axes;
  axes.coverage_threshold = {0.5, 1.5};
  CHECK_THROWS_AS(sweep(ds, options, axes, 3), ConfigError);
  SweepAxes none;
  CHECK_THROWS_AS(sweep(ds, options, none, 3), ConfigError);
}

TEST_CASE("reports and models are byte-identical across runs") {
  const Dataset ds = make_gaussian_dataset(150, 5, 3, 3.0, 77);
  FitOptions options;
  options.seed = 42;
  options.optimize_partitions = true;
  options.search.max_cycles = 3;

  auto run = [&] {
    const EvalReport report = cross_validate(ds, options, 5);
    std::ostringstream csv, manifest;
    const EvalReport reports[] = {report};
    write_report_csv(csv, reports);
    write_manifest(manifest, options, 5, reports);
    const FitResult fit =
        fit_model(ds.X, ds.y, ds.feature_names, ds.class_names, options);
    return csv.str() + "\n---\n" + manifest.str() + "\n---\n" +
           model_to_string(fit.model);
  };
  CHECK(run() == run());
}

TEST_CASE("fold parallelism does not change results") {
  const Dataset ds = make_gaussian_dataset(200, 5, 2, 2.0, 31);
  FitOptions sequential;
  sequential.seed = 11;
  FitOptions parallel = sequential;
  parallel.threads = 4;
  std::ostringstream a, b;
  const EvalReport ra[] = {cross_validate(ds, sequential, 5)};
  const EvalReport rb[] = {cross_validate(ds, parallel, 5)};
  write_report_csv(a, ra);
  write_report_csv(b, rb);
  CHECK(a.str() == b.str());
}

TEST_CASE("per-feature optimization parallelism does not change the model") {
  const Dataset ds = make_gaussian_dataset(150, 6, 2, 2.0, 47);
  FitOptions sequential;
  sequential.seed = 3;
  sequential.optimize_partitions = true;
  FitOptions parallel = sequential;
  parallel.threads = 3;
  const FitResult a =
      fit_model(ds.X, ds.y, ds.feature_names, ds.class_names, sequential);
  const FitResult b =
      fit_model(ds.X, ds.y, ds.feature_names, ds.class_names, parallel);
  CHECK(model_to_string(a.model) == model_to_string(b.model));
}

TEST_CASE("rulebase size equals rules times conditions per rule") {
  const Dataset ds = make_gaussian_dataset(120, 4, 3, 3.0, 19);
  FitOptions options;
  options.seed = 2;
  const EvalReport report = cross_validate(ds, options, 4);
  for (const FoldResult& fr : report.folds) {
    CHECK(fr.rulebase_size ==
          doctest::Approx(fr.num_rules * fr.conditions_per_rule));
  }
}

TEST_CASE("degenerate features are dropped and recorded") {
  Dataset ds = make_gaussian_dataset(60, 3, 2, 3.0, 12);
  for (std::size_t i = 0; i < ds.X.rows; ++i) ds.X.at(i, 1) = 4.2;  // constant
  FitOptions options;
  const FitResult fit =
      fit_model(ds.X, ds.y, ds.feature_names, ds.class_names, options);
  REQUIRE(fit.model.dropped_features.size() == 1);
  CHECK(fit.model.dropped_features[0].name == "f1");
  CHECK(fit.model.dropped_features[0].source_index == 1);
  CHECK(fit.model.features.size() == 2);
  // model still classifies raw 3-feature rows
  const Prediction pred = classify(fit.model, ds.X.row(0));
  CHECK(pred.class_scores.size() == 2);
}

TEST_CASE("runtime scaling completes and records nonzero timings") {
  const int n_grid[] = {10, 50};
  const auto rows = runtime_scaling(n_grid, {}, 10, 4, 5, TreeConfig{});
  REQUIRE(rows.size() == 2);
  for (const TimingRow& row : rows) {
    CHECK(row.train_seconds > 0.0);
    CHECK(row.m == 4);
  }
  std::ostringstream out;
  write_timings_csv(out, rows);
  CHECK(out.str().find("n,m,train_seconds") != std::string::npos);
}

TEST_CASE("loglog slope of a cubic is three") {
  const std::vector<double> x{10, 100, 1000};
  std::vector<double> y;
  for (double v : x) y.push_back(v * v * v);
  CHECK(fit_loglog_slope(x, y) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("partition dump lists every term with separability columns") {
  const Dataset ds = make_gaussian_dataset(90, 2, 2, 2.5, 8);
  FitOptions options;
  options.optimize_partitions = true;
  const FitResult fit =
      fit_model(ds.X, ds.y, ds.feature_names, ds.class_names, options);
  REQUIRE(fit.partition_records.size() == 2);
  for (const PartitionRecord& rec : fit.partition_records) {
    CHECK(rec.si_after >= rec.si_search_start);
    CHECK(rec.evaluations > 0);
    CHECK(rec.evaluations <= 180);
  }
  std::ostringstream out;
  write_partition_dump(out, fit.partition_records);
  const std::string text = out.str();
  CHECK(text.find("feature,term,a,b,c,d,si_before,si_after,evaluations") !=
        std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 2 * 3);
}

TEST_CASE("an all-constant feature matrix cannot be fit") {
  Dataset ds = make_gaussian_dataset(40, 2, 2, 3.0, 3);
  for (std::size_t i = 0; i < ds.X.rows; ++i) {
    ds.X.at(i, 0) = 1.0;
    ds.X.at(i, 1) = 2.0;
  }
  FitOptions options;
  CHECK_THROWS_AS(
      fit_model(ds.X, ds.y, ds.feature_names, ds.class_names, options),
      DataError);
}

TEST_CASE("model files with unknown references are rejected") {
  const Dataset ds = make_gaussian_dataset(80, 2, 2, 3.0, 17);
  FitOptions options;
  const FitResult fit =
      fit_model(ds.X, ds.y, ds.feature_names, ds.class_names, options);
  REQUIRE(!fit.model.rules.empty());
  std::string text = model_to_string(fit.model);

  std::string broken = text;
  const std::size_t pos = broken.find("\"feature\": \"f");
  REQUIRE(pos != std::string::npos);
  broken.replace(pos, 13, "\"feature\": \"z");
  CHECK_THROWS_AS(model_from_string(broken), DataError);

  CHECK_THROWS_AS(model_from_string("not json"), DataError);
}

TEST_CASE("model files survive a save/load roundtrip") {
  const Dataset ds = make_gaussian_dataset(100, 3, 2, 3.0, 21);
  FitOptions options;
  options.seed = 5;
  options.dataset_name = ds.name;
  const FitResult fit =
      fit_model(ds.X, ds.y, ds.feature_names, ds.class_names, options);
  const std::string text = model_to_string(fit.model);
  const FgrtModel back = model_from_string(text);
  CHECK(model_to_string(back) == text);
  // loaded model predicts identically
  for (int i = 0; i < 10; ++i) {
    CHECK(classify(back, ds.X.row(i)).predicted_class ==
          classify(fit.model, ds.X.row(i)).predicted_class);
  }
}
