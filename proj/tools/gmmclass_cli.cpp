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

// Command-line front-end: dataset generation, single-shot fits, k* and SVP
// probes, bound tables and experiment sweeps. Exit codes: 0 success, 1 usage
// error, 2 numerical or configuration error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gmmclass.hpp"

namespace {

using namespace gmmclass;

// Named spectra resolve against p; anything starting with '{' is parsed as a
// spectrum JSON object.
SpectrumSpec parse_spectrum(const std::string& s, Index p) {
  if (!s.empty() && s.front() == '{') {
    auto spec = nlohmann::json::parse(s).get<SpectrumSpec>();
    if (spec.p == 0 && spec.kind != "explicit") spec.p = p;
    return spec;
  }
  if (s == "identity") return SpectrumSpec{"identity", p};
  if (s == "linear" || s == "large-fig1") return SpectrumSpec{"linear", p};
  if (s == "medium-fig1") return SpectrumSpec{"spiked", p, 3, 1.0, 0.01};
  throw InvalidArgument("unknown spectrum '" + s + "' (identity, linear, large-fig1, medium-fig1 or a JSON object)");
}

std::vector<double> parse_lambdas(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok == "inf" || tok == "infinity") {
        out.push_back(kInf);
        continue;
      }
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      require(used == tok.size() && !tok.empty() && v >= 0.0, "bad lambda '" + tok + "' (non-negative number or inf)");
      out.push_back(v);
    }
  }
  return out;
}

// Writes to --out when given, standard output otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw InvalidArgument("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct DataFlags {
  std::string spectrum = "identity";
  Index p = 500;
  Index n = 30;
  std::uint64_t seed = 0;
  double signal_norm = 1.0;
  std::string noise = "gaussian";
};

void add_data_flags(CLI::App* cmd, DataFlags& f) {
  cmd->add_option("--spectrum", f.spectrum, "Spectrum name (identity, linear, large-fig1, medium-fig1) or JSON object")->capture_default_str();
  cmd->add_option("--p", f.p, "Dimension")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--n", f.n, "Training sample size")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "Master seed")->required();
  cmd->add_option("--signal-norm", f.signal_norm, "Euclidean norm of theta (spherical direction)")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--noise", f.noise, "Noise kind")->capture_default_str()->check(CLI::IsMember({"gaussian", "rademacher"}));
}

MixtureParams make_params(const DataFlags& f) {
  const CovarianceModel cov = parse_spectrum(f.spectrum, f.p).build();
  require(cov.dim() == f.p, "spectrum dimension differs from --p");
  Philox rng = make_stream(f.seed, StreamTag::kTheta);
  return MixtureParams(sample_theta_spherical(f.p, f.signal_norm, rng), cov, parse_noise_kind(f.noise));
}

void report_excluded(const SweepResult& res) {
  for (const auto& e : res.excluded)
    std::cerr << "excluded cell: signal_norm_sq=" << format_double(e.signal_norm_sq) << " classifier=" << e.classifier
              << " lambda=" << format_double(e.lambda) << " failures=" << e.failures << " (" << e.first_error << ")\n";
}

struct SweepFlags {
  std::string out;
  unsigned threads = 1;
  std::optional<Index> replicates;
  std::optional<std::string> risk_mode;
  std::optional<std::uint64_t> seed;
};

void add_sweep_flags(CLI::App* cmd, SweepFlags& f, bool seed_required) {
  auto* seed = cmd->add_option("--seed", f.seed, "Master seed");
  if (seed_required) seed->required();
  cmd->add_option("--out", f.out, "Results CSV path (default: standard output)");
  cmd->add_option("--threads", f.threads, "Worker threads; output does not depend on it")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--replicates", f.replicates, "Replicates per signal level")->check(CLI::PositiveNumber);
  cmd->add_option("--risk-mode", f.risk_mode, "exact or mc:<test samples>");
}

void run_and_write(ExperimentConfig cfg, const SweepFlags& f) {
  if (f.seed) cfg.seed = *f.seed;
  if (f.replicates) cfg.replicates = *f.replicates;
  if (f.risk_mode) cfg.risk_mode = RiskMode::parse(*f.risk_mode);
  const SweepResult res = run_sweep(cfg, f.threads);
  report_excluded(res);
  Output out(f.out);
  write_results_csv(out.stream(), cfg.experiment, res.rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gmmclass: supervised classification in the anisotropic two-component mixture model"};
  app.require_subcommand(1, 1);

  // generate
  DataFlags gen;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Sample a training set and write it as CSV (col,label,y_1..y_p)");
  add_data_flags(generate, gen);
  generate->add_option("--out", gen_out, "Output CSV path (default: standard output)");

  // fit
  DataFlags fitf;
  std::vector<std::string> fit_lambdas{"0,0.5,3,inf"};
  std::string fit_risk = "exact";
  std::string fit_out;
  auto* fit = app.add_subcommand("fit", "Fit every classifier on one sampled training set and report its risk");
  add_data_flags(fit, fitf);
  fit->add_option("--lambda", fit_lambdas, "Ridge parameters, comma separated (0 = interpolator, inf = averaging)")->capture_default_str();
  fit->add_option("--risk-mode", fit_risk, "exact or mc:<test samples>")->capture_default_str();
  fit->add_option("--out", fit_out, "Output CSV path (default: standard output)");

  // kstar
  std::string ks_spectrum = "identity";
  Index ks_p = 500;
  Index ks_n = 30;
  std::vector<std::string> ks_lambdas{"0"};
  double ks_c1 = kDefaultC1;
  auto* kstar = app.add_subcommand("kstar", "Print k*(lambda), one line per lambda");
  kstar->add_option("--spectrum", ks_spectrum, "Spectrum name or JSON object")->capture_default_str();
  kstar->add_option("--p", ks_p, "Dimension for named spectra")->capture_default_str()->check(CLI::PositiveNumber);
  kstar->add_option("--n", ks_n, "Sample size")->capture_default_str()->check(CLI::PositiveNumber);
  kstar->add_option("--lambda", ks_lambdas, "Ridge parameters, comma separated")->capture_default_str();
  kstar->add_option("--c1", ks_c1, "Threshold constant C1 > 1")->capture_default_str();

  // svp-check
  DataFlags svpf;
  svpf.p = 2000;
  svpf.n = 20;
  Index trials = 200;
  double svp_const = 1.0;
  double svp_c1 = kDefaultC1;
  std::string svp_out;
  auto* svpcheck = app.add_subcommand("svp-check", "Empirical support-vector proliferation rate over independent trials");
  add_data_flags(svpcheck, svpf);
  svpcheck->add_option("--trials", trials, "Number of independent training sets")->capture_default_str()->check(CLI::PositiveNumber);
  svpcheck->add_option("--const", svp_const, "Constant C in the sufficient conditions")->capture_default_str();
  svpcheck->add_option("--c1", svp_c1, "Threshold constant C1 for k*")->capture_default_str();
  svpcheck->add_option("--out", svp_out, "Output CSV path (default: standard output)");

  // bounds
  std::string b_spectrum = "identity";
  Index b_p = 500;
  Index b_n = 30;
  std::vector<std::string> b_lambdas{"0,0.5,3"};
  double b_c1 = kDefaultC1;
  double b_delta = 0.1;
  double b_small = 1.0;
  double b_big = 1.0;
  std::string b_direction = "flat";
  Index b_points = 12;
  std::string b_out;
  auto* bounds = app.add_subcommand("bounds", "Tabulate the theoretical bound curves over the default signal grid");
  bounds->add_option("--spectrum", b_spectrum, "Spectrum name or JSON object")->capture_default_str();
  bounds->add_option("--p", b_p, "Dimension for named spectra")->capture_default_str()->check(CLI::PositiveNumber);
  bounds->add_option("--n", b_n, "Sample size")->capture_default_str()->check(CLI::PositiveNumber);
  bounds->add_option("--lambda", b_lambdas, "Ridge parameters for the ridge bound")->capture_default_str();
  bounds->add_option("--c1", b_c1, "Threshold constant C1 for k*")->capture_default_str();
  bounds->add_option("--delta-prob", b_delta, "Failure probability delta in (0,1)")->capture_default_str();
  bounds->add_option("--bound-c", b_small, "Exponent constant c")->capture_default_str();
  bounds->add_option("--bound-C", b_big, "Prefactor constant C")->capture_default_str();
  bounds->add_option("--direction", b_direction, "theta direction: flat (uniform weights) or top (top eigenvector)")
      ->capture_default_str()
      ->check(CLI::IsMember({"flat", "top"}));
  bounds->add_option("--grid-points", b_points, "Number of signal levels")->capture_default_str()->check(CLI::PositiveNumber);
  bounds->add_option("--out", b_out, "Output CSV path (default: standard output)");

  // run
  SweepFlags runf;
  std::string config_path;
  std::optional<Index> run_p;
  std::optional<Index> run_n;
  std::optional<std::string> run_spectrum;
  std::vector<std::string> run_lambdas;
  auto* run = app.add_subcommand("run", "Run an experiment sweep from a JSON config; flags override config values");
  run->add_option("--config", config_path, "Experiment config JSON file")->required()->check(CLI::ExistingFile);
  add_sweep_flags(run, runf, false);
  run->add_option("--p", run_p, "Override p");
  run->add_option("--n", run_n, "Override n");
  run->add_option("--spectrum", run_spectrum, "Override spectrum (name or JSON object)");
  run->add_option("--lambda", run_lambdas, "Override lambdas, comma separated");

  // fig1 / fig2
  SweepFlags fig1f;
  std::string variant;
  auto* fig1 = app.add_subcommand("fig1", "Interpolation vs regularization sweep (p=500, n=30)");
  fig1->add_option("--variant", variant, "Spectrum variant")->required()->check(CLI::IsMember({"large", "medium"}));
  add_sweep_flags(fig1, fig1f, true);

  SweepFlags fig2f;
  auto* fig2 = app.add_subcommand("fig2", "Robustness sweep with corrupted training covariance (p=500, n=30)");
  add_sweep_flags(fig2, fig2f, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*generate) {
      const MixtureParams params = make_params(gen);
      const Dataset d = sample_dataset(params, gen.n, gen.seed);
      Output out(gen_out);
      write_dataset_csv(out.stream(), d);
    } else if (*fit) {
      const MixtureParams params = make_params(fitf);
      const Dataset d = sample_dataset(params, fitf.n, fitf.seed);
      const RiskMode mode = RiskMode::parse(fit_risk);
      ExperimentConfig cfg;
      cfg.lambdas = parse_lambdas(fit_lambdas);
      cfg.classifiers = {"ridge", "lda"};
      if (d.dim() >= d.size()) cfg.classifiers.push_back("svm");
      std::ostringstream os;  // buffered so a failed fit leaves no partial output
      os << "classifier,lambda,exact_risk,mc_risk,mc_halfwidth\n";
      std::uint64_t cell_index = 0;
      for (const auto& cell : sweep_cells(cfg)) {
        std::optional<LinearClassifier> c;
        if (cell.id == "averaging")
          c = averaging(d);
        else if (cell.id == "interpolator")
          c = interpolator(d);
        else if (cell.id == "ridge")
          c = ridge(d, cell.lambda);
        else if (cell.id == "lda")
          c = lda(d, params.covariance);
        else
          c = svm_hard(d).classifier;
        os << cell.id << ',' << format_double(cell.lambda) << ',';
        if (params.noise == NoiseKind::kGaussian) os << format_double(exact_gaussian_risk(c->weights(), params.theta, params.covariance));
        os << ',';
        if (!mode.exact) {
          const auto r = mc_risk(*c, params, mode.samples, detail::splitmix64(fitf.seed ^ ++cell_index));
          os << format_double(*r.mc_estimate) << ',' << format_double(*r.mc_halfwidth);
        } else {
          os << ',';
        }
        os << '\n';
      }
      Output out(fit_out);
      out.stream() << os.str();
    } else if (*kstar) {
      const CovarianceModel cov = parse_spectrum(ks_spectrum, ks_p).build();
      require(ks_c1 > 1.0, "--c1 must exceed 1");
      for (double l : parse_lambdas(ks_lambdas)) {
        require(std::isfinite(l), "kstar: lambda must be finite");
        std::cout << k_star(cov, l, ks_n, ks_c1) << '\n';
      }
    } else if (*svpcheck) {
      Index holds = 0;
      Index conditions = 0;
      const CovarianceModel cov = parse_spectrum(svpf.spectrum, svpf.p).build();
      require(cov.dim() == svpf.p, "spectrum dimension differs from --p");
      for (Index t = 0; t < trials; ++t) {
        Philox theta_rng = make_stream(svpf.seed, StreamTag::kTheta, static_cast<std::uint64_t>(t));
        const MixtureParams params(sample_theta_spherical(svpf.p, svpf.signal_norm, theta_rng), cov, parse_noise_kind(svpf.noise));
        Philox data_rng = make_stream(svpf.seed, StreamTag::kDataset, static_cast<std::uint64_t>(t));
        const Dataset d = sample_dataset(params, svpf.n, data_rng);
        holds += svp_margins(d).holds ? 1 : 0;
        if (svpf.n >= 2) conditions += prolif_conditions(cov, params.theta, svpf.n, svp_const, svp_c1).all ? 1 : 0;
      }
      Output out(svp_out);
      out.stream() << "trials,svp_holds,svp_rate,conditions_rate\n"
                   << trials << ',' << holds << ',' << format_double(static_cast<double>(holds) / static_cast<double>(trials)) << ','
                   << format_double(static_cast<double>(conditions) / static_cast<double>(trials)) << '\n';
    } else if (*bounds) {
      const CovarianceModel cov = parse_spectrum(b_spectrum, b_p).build();
      const BoundConstants k{b_small, b_big};
      const Vector dir = b_direction == "top" ? cov.eigenvector(0)
                                              : Vector(Vector::Ones(cov.dim()) / std::sqrt(static_cast<double>(cov.dim())));
      const auto lambdas = parse_lambdas(b_lambdas);
      Output out(b_out);
      auto& os = out.stream();
      os << "signal_norm_sq,bound,lambda,value,k_star,cone\n";
      const double r_sq = cov.trace_sq() / (cov.spectral_norm() * cov.spectral_norm());
      for (double t2 : default_signal_grid(cov, b_n, b_points)) {
        const Vector theta = dir * std::sqrt(t2);
        const double delta = std::sqrt(t2 / cov.spectral_norm());
        const std::string s = format_double(t2);
        os << s << ",minimax_lower,," << format_double(bound_minimax_lower(delta, r_sq, b_n, k)) << ",,\n";
        os << s << ",averaging_upper,," << format_double(bound_averaging_upper(theta, cov, b_n, b_delta, k)) << ",,\n";
        if (cov.dim() >= b_n) os << s << ",lda_lower,," << format_double(bound_lda_lower(theta, cov, b_n, k)) << ",,\n";
        for (double l : lambdas) {
          const RidgeBound rb = bound_ridge_upper(theta, cov, l, b_n, b_delta, k, b_c1);
          os << s << ",ridge_upper," << format_double(l) << ',' << (rb.value ? format_double(*rb.value) : "") << ',' << rb.k_star
             << ',' << (rb.cone_condition ? 1 : 0) << '\n';
        }
      }
    } else if (*run) {
      std::ifstream in(config_path);
      require(static_cast<bool>(in), "cannot read config '" + config_path + "'");
      const nlohmann::json j = nlohmann::json::parse(in);
      ExperimentConfig cfg;
      apply_json(j, cfg);
      if (run_p) cfg.p = *run_p;
      if (run_n) cfg.n = *run_n;
      if (run_spectrum) cfg.spectrum = parse_spectrum(*run_spectrum, cfg.p);
      if (run_p && !run_spectrum && cfg.spectrum.kind != "explicit") cfg.spectrum.p = cfg.p;
      if (!run_lambdas.empty()) cfg.lambdas = parse_lambdas(run_lambdas);
      require(j.contains("seed") || runf.seed.has_value(), "run: a seed is required (config 'seed' or --seed)");
      run_and_write(cfg, runf);
    } else if (*fig1) {
      run_and_write(preset_fig1(variant == "large" ? Fig1Variant::kLargeRank : Fig1Variant::kMediumRank), fig1f);
    } else if (*fig2) {
      run_and_write(preset_fig2(), fig2f);
    }
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
