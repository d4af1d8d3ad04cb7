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

#ifndef GMMCLASS_EXPERIMENTS_HPP_
#define GMMCLASS_EXPERIMENTS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmmclass/classify.hpp"
#include "gmmclass/common.hpp"
#include "gmmclass/mixture.hpp"
#include "gmmclass/parallel.hpp"
#include "gmmclass/rng.hpp"
#include "gmmclass/risk.hpp"
#include "gmmclass/spectra.hpp"
#include "gmmclass/svp.hpp"

namespace gmmclass {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct RiskMode {
  bool exact = true;
  std::int64_t samples = 0;  // test draws per replicate when !exact

  static RiskMode parse(const std::string& s) {
    if (s == "exact") return {};
    if (s.rfind("mc:", 0) == 0) {
      std::size_t used = 0;
      long long m = 0;
      try {
        m = std::stoll(s.substr(3), &used);
      } catch (const std::exception&) {
        used = 0;
      }
      require(used == s.size() - 3 && m >= 1, "risk mode: expected mc:<positive integer>, got '" + s + "'");
      return {false, m};
    }
    throw InvalidArgument("risk mode: expected 'exact' or 'mc:<m>', got '" + s + "'");
  }

  std::string str() const { return exact ? "exact" : "mc:" + std::to_string(samples); }
};

enum class ThetaDirection { kSpherical, kTopEigenvector };

// Training-set corruption. Either a fixed coordinate set (`indices` with
// per-coordinate `magnitudes`) or `count` coordinates redrawn uniformly for
// every replicate, all with variance increment `magnitude`.
struct CorruptionConfig {
  Index count = 0;
  double magnitude = 0.0;
  Index budget = 0;
  std::vector<Index> indices{};
  std::vector<double> magnitudes{};

  bool fixed() const { return !indices.empty(); }
};

struct ExperimentConfig {
  std::string experiment = "custom";
  Index p = 0;
  Index n = 0;
  std::vector<double> signal_norms_sq;  // empty: default grid
  Index grid_points = 12;
  std::vector<double> lambdas;          // +inf is the averaging classifier
  SpectrumSpec spectrum;
  std::optional<CorruptionConfig> corruption;
  Index replicates = 1;
  std::uint64_t seed = 0;
  RiskMode risk_mode;
  std::vector<std::string> classifiers;  // averaging, lda, ridge, interpolator, svm
  NoiseKind noise = NoiseKind::kGaussian;
  ThetaDirection theta = ThetaDirection::kSpherical;
};

// One classifier column of a sweep. `lambda` is NaN for classifiers outside
// the ridge family.
struct SweepCell {
  std::string id;
  double lambda;
};

struct ResultRow {
  double signal_norm_sq = 0.0;
  std::string classifier;
  double lambda = 0.0;
  double mean_risk = 0.0;
  double std_error = 0.0;
  Index replicates = 0;  // successful replicates
  Index failures = 0;
  std::optional<double> svp_rate;                    // svm cells
  std::optional<double> max_interpolation_residual;  // interpolator cells
};

struct ExcludedCell {
  double signal_norm_sq;
  std::string classifier;
  double lambda;
  Index failures;
  std::string first_error;
};

struct SweepResult {
  std::vector<ResultRow> rows;
  std::vector<ExcludedCell> excluded;
};

// Expands the classifier list: "ridge" fans out over lambdas, with lambda = 0
// mapped to the interpolator and lambda = inf to averaging.
inline std::vector<SweepCell> sweep_cells(const ExperimentConfig& cfg) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<SweepCell> cells;
  auto add = [&](std::string id, double lambda) {
    for (const auto& c : cells)
      if (c.id == id && (c.lambda == lambda || (std::isnan(c.lambda) && std::isnan(lambda)))) return;
    cells.push_back({std::move(id), lambda});
  };
  for (const auto& name : cfg.classifiers) {
    if (name == "averaging") {
      add("averaging", kInf);
    } else if (name == "interpolator") {
      add("interpolator", 0.0);
    } else if (name == "lda") {
      add("lda", nan);
    } else if (name == "svm") {
      add("svm", nan);
    } else if (name == "ridge") {
      for (double l : cfg.lambdas) {
        if (l == 0.0)
          add("interpolator", 0.0);
        else if (std::isinf(l))
          add("averaging", kInf);
        else
          add("ridge", l);
      }
    } else {
      throw InvalidArgument("unknown classifier '" + name + "'");
    }
  }
  return cells;
}

// 12 log-spaced squared signal norms over [s/16, 16 s], s = sqrt(Tr(Sigma^2)/n)
// of the clean covariance.
inline std::vector<double> default_signal_grid(const CovarianceModel& model, Index n, Index points = 12) {
  require(points >= 1, "signal grid: need at least one point");
  const double s = std::sqrt(model.trace_sq() / static_cast<double>(n));
  const double lo = std::log(s / 16.0);
  const double hi = std::log(16.0 * s);
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (Index i = 0; i < points; ++i)
    grid[static_cast<std::size_t>(i)] = points == 1 ? s : std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
  return grid;
}

inline void validate(const ExperimentConfig& cfg) {
  require(cfg.p >= 1 && cfg.n >= 1, "config: p and n must be >= 1");
  require(cfg.replicates >= 1, "config: replicates must be >= 1");
  require(!cfg.classifiers.empty(), "config: classifiers must be non-empty");
  require(cfg.spectrum.dim() == cfg.p, "config: spectrum dimension differs from p");
  for (double s : cfg.signal_norms_sq) require(s > 0.0 && std::isfinite(s), "config: signal norms must be positive");
  for (double l : cfg.lambdas) require(l >= 0.0, "config: lambdas must be >= 0");
  const auto cells = sweep_cells(cfg);
  require(!cells.empty(), "config: no classifiers to run (ridge needs lambdas)");
  for (const auto& c : cells)
    if (c.id == "interpolator" || c.id == "svm") require(cfg.p >= cfg.n, "config: interpolator and svm require p >= n");
  require(cfg.risk_mode.exact ? cfg.noise == NoiseKind::kGaussian : cfg.risk_mode.samples >= 1,
          "config: exact risk needs gaussian noise; use risk_mode mc:<m>");
  if (cfg.corruption) {
    const auto& c = *cfg.corruption;
    if (c.fixed()) {
      CorruptionSpec{c.indices, c.magnitudes, c.budget}.validate(cfg.p);
    } else {
      require(c.count >= 0 && c.count <= cfg.p, "config: corruption count must lie in [0, p]");
      require(c.count <= c.budget, "config: corruption budget exceeded");
      require(c.count == 0 || c.magnitude > 0.0, "config: corruption magnitude must be positive");
    }
  }
  (void)cfg.spectrum.build();
}

namespace detail {

struct ReplicateOutcome {
  double risk = 0.0;
  bool ok = false;
  bool svp = false;
  double residual = 0.0;
  std::string error;
};

}  // namespace detail

// Runs every (signal norm, replicate) pair: draw theta, sample training data,
// optionally corrupt it, fit each classifier, score it against the clean
// covariance. Streams derive from (seed, signal index, replicate index) and
// results are reduced in index order, so output is independent of `threads`.
inline SweepResult run_sweep(const ExperimentConfig& cfg, unsigned threads = 1) {
  validate(cfg);
  const CovarianceModel clean = cfg.spectrum.build();
  const std::vector<double> grid = cfg.signal_norms_sq.empty() ? default_signal_grid(clean, cfg.n, cfg.grid_points) : cfg.signal_norms_sq;
  const std::vector<SweepCell> cells = sweep_cells(cfg);
  const std::size_t n_cells = cells.size();
  const std::size_t reps = static_cast<std::size_t>(cfg.replicates);
  std::vector<detail::ReplicateOutcome> outcomes(grid.size() * reps * n_cells);

  parallel_for(grid.size() * reps, threads, [&](std::size_t item) {
    const std::size_t s = item / reps;
    const std::size_t r = item % reps;
    const double norm = std::sqrt(grid[s]);
    Vector theta;
    if (cfg.theta == ThetaDirection::kSpherical) {
      Philox rng = make_stream(cfg.seed, StreamTag::kTheta, s, r);
      theta = sample_theta_spherical(cfg.p, norm, rng);
    } else {
      theta = clean.eigenvector(0) * norm;
    }
    const MixtureParams params(theta, clean, cfg.noise);
    Philox data_rng = make_stream(cfg.seed, StreamTag::kDataset, s, r);
    Dataset train = sample_dataset(params, cfg.n, data_rng);
    if (cfg.corruption) {
      const auto& c = *cfg.corruption;
      CorruptionSpec spec;
      if (c.fixed()) {
        spec = CorruptionSpec{c.indices, c.magnitudes, c.budget};
      } else {
        Philox set_rng = make_stream(cfg.seed, StreamTag::kCorruptionSet, s, r);
        spec = random_corruption(cfg.p, c.count, c.magnitude, c.budget, set_rng);
      }
      Philox noise_rng = make_stream(cfg.seed, StreamTag::kCorruption, s, r);
      train = corrupt(train, spec, noise_rng);
    }
    for (std::size_t ci = 0; ci < n_cells; ++ci) {
      auto& out = outcomes[item * n_cells + ci];
      const auto& cell = cells[ci];
      try {
        std::optional<LinearClassifier> fit;
        if (cell.id == "averaging") {
          fit = averaging(train);
        } else if (cell.id == "interpolator") {
          fit = interpolator(train);
          out.residual = interpolation_residual(fit->weights(), train);
        } else if (cell.id == "ridge") {
          fit = ridge(train, cell.lambda);
        } else if (cell.id == "lda") {
          fit = lda(train, clean);
        } else {
          auto svm = svm_hard(train);
          out.svp = svp_margins(train).holds;
          fit = std::move(svm.classifier);
        }
        if (cfg.risk_mode.exact) {
          out.risk = exact_gaussian_risk(fit->weights(), theta, clean);
        } else {
          const std::uint64_t test_seed = detail::splitmix64(cfg.seed ^ detail::splitmix64((s << 32) ^ (r << 8) ^ ci));
          out.risk = *mc_risk(*fit, params, cfg.risk_mode.samples, test_seed).mc_estimate;
        }
        out.ok = true;
      } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
      }
    }
  });

  SweepResult result;
  for (std::size_t s = 0; s < grid.size(); ++s) {
    for (std::size_t ci = 0; ci < n_cells; ++ci) {
      double sum = 0.0;
      Index ok = 0;
      Index failures = 0;
      Index svp = 0;
      double residual = 0.0;
      std::string first_error;
      for (std::size_t r = 0; r < reps; ++r) {
        const auto& o = outcomes[(s * reps + r) * n_cells + ci];
        if (!o.ok) {
          if (failures++ == 0) first_error = o.error;
          continue;
        }
        ++ok;
        sum += o.risk;
        svp += o.svp ? 1 : 0;
        residual = std::max(residual, o.residual);
      }
      const auto& cell = cells[ci];
      if (ok == 0 || static_cast<double>(failures) > 0.01 * static_cast<double>(reps)) {
        result.excluded.push_back({grid[s], cell.id, cell.lambda, failures, first_error});
        continue;
      }
      const double mean = sum / static_cast<double>(ok);
      double ss = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        const auto& o = outcomes[(s * reps + r) * n_cells + ci];
        if (o.ok) ss += (o.risk - mean) * (o.risk - mean);
      }
      ResultRow row;
      row.signal_norm_sq = grid[s];
      row.classifier = cell.id;
      row.lambda = cell.lambda;
      row.mean_risk = mean;
      row.std_error = ok > 1 ? std::sqrt(ss / static_cast<double>(ok - 1) / static_cast<double>(ok)) : 0.0;
      row.replicates = ok;
      row.failures = failures;
      if (cell.id == "svm") row.svp_rate = static_cast<double>(svp) / static_cast<double>(ok);
      if (cell.id == "interpolator") row.max_interpolation_residual = residual;
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

inline ExperimentConfig preset_base() {
  ExperimentConfig cfg;
  cfg.p = 500;
  cfg.n = 30;
  cfg.replicates = 1000;
  cfg.lambdas = {0.0, 0.5, 3.0, kInf};
  cfg.classifiers = {"ridge"};
  return cfg;
}

enum class Fig1Variant { kLargeRank, kMediumRank };

// p = 500, n = 30, 1000 replicates, lambda in {0, 0.5, 3, inf}; spectrum
// lambda_i = (p-i+1)/p (large effective rank) or (1, 1, 1, 0.01, ...)
// (medium effective rank).
inline ExperimentConfig preset_fig1(Fig1Variant variant) {
  ExperimentConfig cfg = preset_base();
  if (variant == Fig1Variant::kLargeRank) {
    cfg.experiment = "fig1-large";
    cfg.spectrum = SpectrumSpec{"linear", cfg.p};
  } else {
    cfg.experiment = "fig1-medium";
    cfg.spectrum = SpectrumSpec{"spiked", cfg.p, 3, 1.0, 0.01};
  }
  return cfg;
}

// Sigma = I_500; n/2 = 15 random training coordinates get variance 1000.
inline ExperimentConfig preset_fig2() {
  ExperimentConfig cfg = preset_base();
  cfg.experiment = "fig2";
  cfg.spectrum = SpectrumSpec{"identity", cfg.p};
  CorruptionConfig c;
  c.count = cfg.n / 2;
  c.magnitude = 999.0;
  c.budget = cfg.n / 2;
  cfg.corruption = c;
  return cfg;
}

inline std::string format_double(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline constexpr const char* kResultsHeader = "experiment,signal_norm_sq,classifier,lambda,mean_risk,stderr,replicates,failures";

inline void write_results_csv(std::ostream& os, const std::string& experiment, const std::vector<ResultRow>& rows) {
  os << kResultsHeader << '\n';
  for (const auto& r : rows)
    os << experiment << ',' << format_double(r.signal_norm_sq) << ',' << r.classifier << ',' << format_double(r.lambda) << ','
       << format_double(r.mean_risk) << ',' << format_double(r.std_error) << ',' << r.replicates << ',' << r.failures << '\n';
}

// JSON config, field names as in ExperimentConfig. lambdas accept "inf".

inline void from_json(const nlohmann::json& j, CorruptionConfig& c) {
  static const std::vector<std::string> known{"count", "magnitude", "budget", "indices", "magnitudes"};
  require(j.is_object(), "corruption: JSON object expected");
  for (const auto& [key, _] : j.items())
    require(std::find(known.begin(), known.end(), key) != known.end(), "corruption: unknown field '" + key + "'");
  c = CorruptionConfig{};
  if (j.contains("count")) j.at("count").get_to(c.count);
  if (j.contains("magnitude")) j.at("magnitude").get_to(c.magnitude);
  if (j.contains("indices")) j.at("indices").get_to(c.indices);
  if (j.contains("magnitudes")) j.at("magnitudes").get_to(c.magnitudes);
  c.budget = j.contains("budget") ? j.at("budget").get<Index>() : (c.fixed() ? static_cast<Index>(c.indices.size()) : c.count);
}

inline void to_json(nlohmann::json& j, const CorruptionConfig& c) {
  j = nlohmann::json{{"budget", c.budget}};
  if (c.fixed()) {
    j["indices"] = c.indices;
    j["magnitudes"] = c.magnitudes;
  } else {
    j["count"] = c.count;
    j["magnitude"] = c.magnitude;
  }
}

inline double lambda_from_json(const nlohmann::json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    require(s == "inf" || s == "infinity", "lambdas: string entries must be \"inf\"");
    return kInf;
  }
  return v.get<double>();
}

inline void apply_json(const nlohmann::json& j, ExperimentConfig& cfg) {
  static const std::vector<std::string> known{"experiment", "p",          "n",           "signal_norms_sq", "grid_points",
                                              "lambdas",    "spectrum",   "corruption",  "replicates",      "seed",
                                              "risk_mode",  "classifiers", "noise",      "theta"};
  require(j.is_object(), "config: JSON object expected");
  for (const auto& [key, _] : j.items())
    require(std::find(known.begin(), known.end(), key) != known.end(), "config: unknown field '" + key + "'");
  if (j.contains("experiment")) j.at("experiment").get_to(cfg.experiment);
  if (j.contains("p")) j.at("p").get_to(cfg.p);
  if (j.contains("n")) j.at("n").get_to(cfg.n);
  if (j.contains("signal_norms_sq")) j.at("signal_norms_sq").get_to(cfg.signal_norms_sq);
  if (j.contains("grid_points")) j.at("grid_points").get_to(cfg.grid_points);
  if (j.contains("lambdas")) {
    cfg.lambdas.clear();
    for (const auto& v : j.at("lambdas")) cfg.lambdas.push_back(lambda_from_json(v));
  }
  if (j.contains("spectrum")) j.at("spectrum").get_to(cfg.spectrum);
  if (j.contains("corruption")) {
    if (j.at("corruption").is_null())
      cfg.corruption.reset();
    else
      cfg.corruption = j.at("corruption").get<CorruptionConfig>();
  }
  if (j.contains("replicates")) j.at("replicates").get_to(cfg.replicates);
  if (j.contains("seed")) j.at("seed").get_to(cfg.seed);
  if (j.contains("risk_mode")) cfg.risk_mode = RiskMode::parse(j.at("risk_mode").get<std::string>());
  if (j.contains("classifiers")) j.at("classifiers").get_to(cfg.classifiers);
  if (j.contains("noise")) cfg.noise = parse_noise_kind(j.at("noise").get<std::string>());
  if (j.contains("theta")) {
    const auto t = j.at("theta").get<std::string>();
    require(t == "spherical" || t == "top", "config: theta must be 'spherical' or 'top'");
    cfg.theta = t == "spherical" ? ThetaDirection::kSpherical : ThetaDirection::kTopEigenvector;
  }
  // Named spectra without their own p take the config's.
  if (cfg.spectrum.p == 0 && cfg.spectrum.kind != "explicit") cfg.spectrum.p = cfg.p;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json lambdas = nlohmann::json::array();
  for (double l : cfg.lambdas) {
    if (std::isinf(l))
      lambdas.push_back("inf");
    else
      lambdas.push_back(l);
  }
  nlohmann::json j{{"experiment", cfg.experiment}, {"p", cfg.p},
                   {"n", cfg.n},                   {"signal_norms_sq", cfg.signal_norms_sq},
                   {"grid_points", cfg.grid_points}, {"lambdas", lambdas},
                   {"spectrum", cfg.spectrum},     {"replicates", cfg.replicates},
                   {"seed", cfg.seed},             {"risk_mode", cfg.risk_mode.str()},
                   {"classifiers", cfg.classifiers}, {"noise", to_string(cfg.noise)},
                   {"theta", cfg.theta == ThetaDirection::kSpherical ? "spherical" : "top"}};
  j["corruption"] = cfg.corruption ? nlohmann::json(*cfg.corruption) : nlohmann::json(nullptr);
  return j;
}

}  // namespace gmmclass

#endif  // GMMCLASS_EXPERIMENTS_HPP_
