// Copyright 2026 The gmmclass Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gmmclass/experiments.hpp"

#include <sstream>

#include <gtest/gtest.h>

namespace gmmclass {
namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.experiment = "small";
  cfg.p = 20;
  cfg.n = 5;
  cfg.signal_norms_sq = {1.0, 4.0};
  cfg.lambdas = {0.0, 0.5, kInf};
  cfg.classifiers = {"ridge"};
  cfg.spectrum = SpectrumSpec{.kind = "linear", .p = 20};
  cfg.replicates = 7;
  cfg.seed = 99;
  return cfg;
}

std::string csv(const ExperimentConfig& cfg, unsigned threads) {
  std::ostringstream os;
  write_results_csv(os, cfg.experiment, run_sweep(cfg, threads).rows);
  return os.str();
}

TEST(SweepCellsTest, RidgeFanOut) {
  ExperimentConfig cfg = small_config();
  cfg.classifiers = {"ridge", "averaging", "lda", "svm", "interpolator"};
  cfg.lambdas = {0.0, 0.5, 3.0, kInf, 0.5};
  const auto cells = sweep_cells(cfg);
  ASSERT_EQ(cells.size(), 6u);
  EXPECT_EQ(cells[0].id, "interpolator");
  EXPECT_EQ(cells[1].id, "ridge");
  EXPECT_EQ(cells[1].lambda, 0.5);
  EXPECT_EQ(cells[2].lambda, 3.0);
  EXPECT_EQ(cells[3].id, "averaging");
  EXPECT_TRUE(std::isinf(cells[3].lambda));
  EXPECT_EQ(cells[4].id, "lda");
  EXPECT_TRUE(std::isnan(cells[4].lambda));
  EXPECT_EQ(cells[5].id, "svm");
  cfg.classifiers = {"bogus"};
  EXPECT_THROW(sweep_cells(cfg), InvalidArgument);
}

TEST(SignalGridTest, DefaultGrid) {
  const auto model = spectrum_linear(500);
  const auto grid = default_signal_grid(model, 30);
  ASSERT_EQ(grid.size(), 12u);
  const double s = std::sqrt(model.trace_sq() / 30.0);
  EXPECT_NEAR(grid.front(), s / 16.0, 1e-12 * s);
  EXPECT_NEAR(grid.back(), 16.0 * s, 1e-12 * s);
  for (std::size_t i = 2; i < grid.size(); ++i) EXPECT_NEAR(grid[i] / grid[i - 1], grid[1] / grid[0], 1e-12);
}

TEST(RunSweepTest, MinimalConfig) {
  ExperimentConfig cfg;
  cfg.p = 3;
  cfg.n = 4;
  cfg.signal_norms_sq = {1.0};
  cfg.classifiers = {"averaging"};
  cfg.spectrum = SpectrumSpec{.kind = "identity", .p = 3};
  cfg.seed = 1;
  const auto res = run_sweep(cfg);
  ASSERT_EQ(res.rows.size(), 1u);
  EXPECT_EQ(res.rows[0].classifier, "averaging");
  EXPECT_EQ(res.rows[0].replicates, 1);
  EXPECT_EQ(res.rows[0].std_error, 0.0);
  EXPECT_TRUE(res.excluded.empty());
}

// Rebuild every replicate from the documented stream layout and check the
// aggregate row by row.
TEST(RunSweepTest, MatchesIndependentReconstruction) {
  ExperimentConfig cfg = small_config();
  CorruptionConfig c;
  c.count = 2;
  c.magnitude = 50.0;
  c.budget = 2;
  cfg.corruption = c;
  const auto res = run_sweep(cfg);
  ASSERT_EQ(res.rows.size(), 6u);
  const auto clean = spectrum_linear(20);
  for (std::size_t s = 0; s < 2; ++s) {
    std::vector<std::vector<double>> risks(3);
    for (std::size_t r = 0; r < 7; ++r) {
      Philox theta_rng = make_stream(99, StreamTag::kTheta, s, r);
      const Vector theta = sample_theta_spherical(20, std::sqrt(cfg.signal_norms_sq[s]), theta_rng);
      Philox data_rng = make_stream(99, StreamTag::kDataset, s, r);
      Dataset d = sample_dataset(MixtureParams(theta, clean), 5, data_rng);
      Philox set_rng = make_stream(99, StreamTag::kCorruptionSet, s, r);
      const auto spec = random_corruption(20, 2, 50.0, 2, set_rng);
      Philox noise_rng = make_stream(99, StreamTag::kCorruption, s, r);
      d = corrupt(d, spec, noise_rng);
      risks[0].push_back(exact_gaussian_risk(interpolator(d).weights(), theta, clean));
      risks[1].push_back(exact_gaussian_risk(ridge(d, 0.5).weights(), theta, clean));
      risks[2].push_back(exact_gaussian_risk(averaging(d).weights(), theta, clean));
    }
    for (std::size_t ci = 0; ci < 3; ++ci) {
      const auto& row = res.rows[s * 3 + ci];
      double mean = 0.0;
      for (double v : risks[ci]) mean += v / 7.0;
      double var = 0.0;
      for (double v : risks[ci]) var += (v - mean) * (v - mean) / 6.0;
      EXPECT_EQ(row.signal_norm_sq, cfg.signal_norms_sq[s]);
      EXPECT_NEAR(row.mean_risk, mean, 1e-14);
      EXPECT_NEAR(row.std_error, std::sqrt(var / 7.0), 1e-14);
      EXPECT_EQ(row.replicates, 7);
      EXPECT_EQ(row.failures, 0);
    }
  }
  EXPECT_EQ(res.rows[0].classifier, "interpolator");
  ASSERT_TRUE(res.rows[0].max_interpolation_residual.has_value());
  EXPECT_LE(*res.rows[0].max_interpolation_residual, 1e-8);
}

TEST(RunSweepTest, DeterministicAcrossThreadCounts) {
  ExperimentConfig cfg = small_config();
  cfg.classifiers = {"ridge", "lda", "svm"};
  const std::string one = csv(cfg, 1);
  EXPECT_EQ(one, csv(cfg, 2));
  EXPECT_EQ(one, csv(cfg, 5));
  cfg.seed = 100;
  EXPECT_NE(one, csv(cfg, 1));
}

TEST(RunSweepTest, McModeDeterministic) {
  ExperimentConfig cfg = small_config();
  cfg.risk_mode = RiskMode::parse("mc:2000");
  cfg.noise = NoiseKind::kRademacher;
  const std::string one = csv(cfg, 1);
  EXPECT_EQ(one, csv(cfg, 3));
  for (const auto& row : run_sweep(cfg).rows) {
    EXPECT_GE(row.mean_risk, 0.0);
    EXPECT_LE(row.mean_risk, 1.0);
  }
}

TEST(RunSweepTest, InfiniteRidgeIsAveraging) {
  ExperimentConfig a = small_config();
  a.lambdas = {kInf};
  ExperimentConfig b = small_config();
  b.classifiers = {"averaging"};
  EXPECT_EQ(csv(a, 1), csv(b, 1));
}

TEST(RunSweepTest, SvmReportsSvpRate) {
  ExperimentConfig cfg = small_config();
  cfg.p = 200;
  cfg.spectrum = SpectrumSpec{.kind = "identity", .p = 200};
  cfg.classifiers = {"svm", "interpolator"};
  const auto res = run_sweep(cfg);
  ASSERT_EQ(res.rows.size(), 4u);
  ASSERT_TRUE(res.rows[0].svp_rate.has_value());
  EXPECT_GE(*res.rows[0].svp_rate, 0.0);
  // When every replicate has SVP, svm and interpolator risks coincide.
  if (*res.rows[0].svp_rate == 1.0) {
    EXPECT_NEAR(res.rows[0].mean_risk, res.rows[1].mean_risk, 1e-6);
  }
}

TEST(RunSweepTest, FrequentFailuresExcludeCell) {
  // Rademacher noise with p = n = 2 makes singular Gram matrices common.
  ExperimentConfig cfg;
  cfg.p = 2;
  cfg.n = 2;
  cfg.signal_norms_sq = {1e-6};
  cfg.classifiers = {"interpolator", "averaging"};
  cfg.spectrum = SpectrumSpec{.kind = "identity", .p = 2};
  cfg.noise = NoiseKind::kRademacher;
  cfg.risk_mode = RiskMode::parse("mc:10");
  cfg.replicates = 200;
  cfg.seed = 5;
  const auto res = run_sweep(cfg);
  ASSERT_EQ(res.excluded.size(), 1u);
  EXPECT_EQ(res.excluded[0].classifier, "interpolator");
  EXPECT_GT(res.excluded[0].failures, 2);
  ASSERT_EQ(res.rows.size(), 1u);
  EXPECT_EQ(res.rows[0].classifier, "averaging");
  EXPECT_FALSE(res.excluded[0].first_error.empty());
}

TEST(ValidateTest, Rejections) {
  ExperimentConfig cfg = small_config();
  validate(cfg);
  auto bad = cfg;
  bad.replicates = 0;
  EXPECT_THROW(validate(bad), InvalidArgument);
  bad = cfg;
  bad.n = 30;
  EXPECT_THROW(validate(bad), InvalidArgument);
  bad = cfg;
  bad.noise = NoiseKind::kRademacher;
  EXPECT_THROW(validate(bad), InvalidArgument);
  bad = cfg;
  bad.spectrum.p = 21;
  EXPECT_THROW(validate(bad), InvalidArgument);
  bad = cfg;
  bad.lambdas = {-1.0};
  EXPECT_THROW(validate(bad), InvalidArgument);
  bad = cfg;
  bad.signal_norms_sq = {0.0};
  EXPECT_THROW(validate(bad), InvalidArgument);
  bad = cfg;
  bad.classifiers.clear();
  EXPECT_THROW(validate(bad), InvalidArgument);
  bad = cfg;
  bad.corruption = CorruptionConfig{.count = 3, .magnitude = 1.0, .budget = 2};
  EXPECT_THROW(validate(bad), InvalidArgument);
}

TEST(PresetsTest, Fig1) {
  for (auto v : {Fig1Variant::kLargeRank, Fig1Variant::kMediumRank}) {
    const auto cfg = preset_fig1(v);
    EXPECT_EQ(cfg.p, 500);
    EXPECT_EQ(cfg.n, 30);
    EXPECT_EQ(cfg.replicates, 1000);
    EXPECT_EQ(cfg.lambdas, (std::vector<double>{0.0, 0.5, 3.0, kInf}));
    EXPECT_EQ(sweep_cells(cfg).size(), 4u);
    EXPECT_TRUE(cfg.risk_mode.exact);
    validate(cfg);
  }
  EXPECT_TRUE(preset_fig1(Fig1Variant::kLargeRank).spectrum.build().eigenvalues().isApprox(spectrum_linear(500).eigenvalues()));
  const auto medium = preset_fig1(Fig1Variant::kMediumRank).spectrum.build();
  EXPECT_EQ(medium.eigenvalue(2), 1.0);
  EXPECT_EQ(medium.eigenvalue(3), 0.01);
  EXPECT_EQ(medium.eigenvalue(499), 0.01);
}

TEST(PresetsTest, Fig2) {
  const auto cfg = preset_fig2();
  ASSERT_TRUE(cfg.corruption.has_value());
  EXPECT_EQ(cfg.corruption->count, 15);
  EXPECT_EQ(cfg.corruption->budget, 15);
  EXPECT_EQ(cfg.corruption->magnitude + 1.0, 1000.0);
  EXPECT_TRUE(cfg.spectrum.build().eigenvalues().isApprox(Vector::Ones(500)));
  validate(cfg);
}

TEST(CsvTest, Format) {
  ResultRow row;
  row.signal_norm_sq = 0.1;
  row.classifier = "ridge";
  row.lambda = 0.5;
  row.mean_risk = 0.25;
  row.std_error = 0.0;
  row.replicates = 3;
  ResultRow lda = row;
  lda.classifier = "lda";
  lda.lambda = std::nan("");
  ResultRow avg = row;
  avg.classifier = "averaging";
  avg.lambda = kInf;
  std::ostringstream os;
  write_results_csv(os, "x", {row, lda, avg});
  EXPECT_EQ(os.str(),
            "experiment,signal_norm_sq,classifier,lambda,mean_risk,stderr,replicates,failures\n"
            "x,0.10000000000000001,ridge,0.5,0.25,0,3,0\n"
            "x,0.10000000000000001,lda,,0.25,0,3,0\n"
            "x,0.10000000000000001,averaging,inf,0.25,0,3,0\n");
}

TEST(ConfigJsonTest, ApplyAndRoundTrip) {
  ExperimentConfig cfg = preset_fig1(Fig1Variant::kLargeRank);
  apply_json(nlohmann::json::parse(R"({"replicates": 5, "lambdas": [0, "inf"], "seed": 3, "risk_mode": "mc:100",
                                        "corruption": {"count": 4, "magnitude": 9}, "theta": "top"})"),
             cfg);
  EXPECT_EQ(cfg.replicates, 5);
  EXPECT_EQ(cfg.lambdas, (std::vector<double>{0.0, kInf}));
  EXPECT_EQ(cfg.seed, 3u);
  EXPECT_FALSE(cfg.risk_mode.exact);
  EXPECT_EQ(cfg.risk_mode.samples, 100);
  ASSERT_TRUE(cfg.corruption.has_value());
  EXPECT_EQ(cfg.corruption->budget, 4);
  EXPECT_EQ(cfg.theta, ThetaDirection::kTopEigenvector);
  EXPECT_EQ(cfg.p, 500);

  ExperimentConfig back;
  apply_json(config_to_json(cfg), back);
  EXPECT_EQ(config_to_json(back), config_to_json(cfg));
  EXPECT_EQ(back.spectrum.kind, "linear");
}

TEST(ConfigJsonTest, SpectrumInheritsP) {
  ExperimentConfig cfg;
  apply_json(nlohmann::json::parse(R"({"p": 50, "n": 10, "spectrum": {"kind": "spiked", "k": 2, "high": 5, "low": 1}})"), cfg);
  EXPECT_EQ(cfg.spectrum.dim(), 50);
  ExperimentConfig bare;
  apply_json(nlohmann::json::parse(R"({"p": 8, "n": 4, "classifiers": ["averaging"], "seed": 1})"), bare);
  EXPECT_EQ(bare.spectrum.kind, "identity");
  EXPECT_EQ(bare.spectrum.dim(), 8);
  validate(bare);
}

TEST(ConfigJsonTest, Rejections) {
  ExperimentConfig cfg;
  EXPECT_THROW(apply_json(nlohmann::json::parse(R"({"replicate": 5})"), cfg), InvalidArgument);
  EXPECT_THROW(apply_json(nlohmann::json::parse(R"({"lambdas": ["big"]})"), cfg), InvalidArgument);
  EXPECT_THROW(apply_json(nlohmann::json::parse(R"({"risk_mode": "mc:0"})"), cfg), InvalidArgument);
  EXPECT_THROW(apply_json(nlohmann::json::parse(R"({"risk_mode": "mc:12x"})"), cfg), InvalidArgument);
  EXPECT_THROW(apply_json(nlohmann::json::parse(R"({"corruption": {"size": 1}})"), cfg), InvalidArgument);
  EXPECT_THROW(apply_json(nlohmann::json::parse(R"({"noise": "laplace"})"), cfg), InvalidArgument);
  EXPECT_THROW(apply_json(nlohmann::json::parse("[1, 2]"), cfg), InvalidArgument);
}

}  // namespace
}  // namespace gmmclass
