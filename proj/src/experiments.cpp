#include "mincomp/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>

#include "mincomp/io.hpp"
#include "mincomp/parallel.hpp"

namespace mincomp {

namespace {

constexpr std::uint64_t kTagEnsemble = 0x454e53u;  // phase: measurement draw
constexpr std::uint64_t kTagPlant = 0x504c54u;     // phase: planted matrix
constexpr std::uint64_t kTagDecode = 0x444543u;    // phase: decoder streams
constexpr std::uint64_t kTagConcX = 0x434d58u;     // concentration: test matrix
constexpr std::uint64_t kTagConcMc = 0x434d43u;    // concentration: draw stream
constexpr std::uint64_t kTagDim = 0x44494du;       // dimension: sample stream

std::vector<int> sweep_ks(const ExperimentConfig& cfg) {
  std::vector<int> ks;
  for (int k = cfg.k_min; k <= cfg.k_max; k += cfg.k_step) ks.push_back(k);
  return ks;
}

struct TrialOutcome {
  bool success = false;
  bool budget_refused = false;
  double rel_error = 1.0;
  long long iterations = 0;
};

TrialOutcome run_phase_trial(const ExperimentConfig& cfg, int k, long long t) {
  const auto tu = static_cast<std::uint64_t>(t);
  const auto ku = static_cast<std::uint64_t>(k);
  const MeasurementEnsemble e = sample_ensemble(
      cfg.ensemble, cfg.m, cfg.n, k, cfg.s,
      derive_seed(cfg.master_seed, kTagEnsemble, ku, tu));
  Rng plant_rng(derive_seed(cfg.master_seed, kTagPlant, ku, tu));
  const std::uint64_t decode_seed = derive_seed(cfg.master_seed, kTagDecode, ku, tu);

  TrialOutcome out;
  AltMinOptions opts;
  opts.r = cfg.r;
  opts.seed = decode_seed;

  if (cfg.decoder == DecoderKind::Enumerate) {
    std::vector<Matrix> cloud;
    cloud.reserve(kEnumCloudSize);
    for (int i = 0; i < kEnumCloudSize; ++i) {
      cloud.push_back(gaussian_matrix(cfg.m, cfg.n, plant_rng));
    }
    const int planted = std::min(
        kEnumCloudSize - 1,
        static_cast<int>(plant_rng.uniform01() * kEnumCloudSize));
    const MeasurementVector y = apply(e, cloud[planted]);
    DecodeResult dr = decode_enumerate(e, y, cloud, kEnumTol);
    attach_truth(dr, cloud[planted]);
    out.success = dr.outcome == Outcome::Recovered && dr.candidate_index == planted;
    out.rel_error = dr.rel_error;
    out.iterations = dr.iterations;
    return out;
  }

  if (cfg.decoder == DecoderKind::SparseFactor) {
    Rng& rx = plant_rng;
    const Matrix x1 = sample_factor(cfg.r, cfg.m, cfg.l1, kPlantedFactorBound, rx);
    const Matrix x2 = sample_factor(cfg.r, cfg.n, cfg.l2, kPlantedFactorBound, rx);
    const Matrix truth = x1.transpose() * x2;
    const MeasurementVector y = apply(e, truth);
    try {
      DecodeResult dr = decode_sparse_factor(e, y, cfg.r, cfg.l1, cfg.l2, opts);
      attach_truth(dr, truth);
      out.success = dr.rel_error <= kSparseSuccessRelErr;
      out.rel_error = dr.rel_error;
      out.iterations = dr.iterations;
    } catch (const BudgetError&) {
      out.budget_refused = true;
      out.rel_error = 1.0;
    }
    return out;
  }

  const Matrix u = gaussian_matrix(cfg.m, cfg.r, plant_rng);
  const Matrix v = gaussian_matrix(cfg.n, cfg.r, plant_rng);
  const Matrix truth = u * v.transpose();
  const MeasurementVector y = apply(e, truth);
  DecodeResult dr = decode_altmin(e, y, opts);
  attach_truth(dr, truth);
  out.success = dr.rel_error <= opts.success_rel_err;
  out.rel_error = dr.rel_error;
  out.iterations = dr.iterations;
  return out;
}

std::string meta_lines(const nlohmann::json* config_meta) {
  std::string out;
  if (config_meta) out += "# config=" + config_meta->dump() + "\n";
  out += std::string("# rng=") + kRngAlgorithm + "\n";
  return out;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Phase: return "phase";
    case ExperimentKind::Concentration: return "concentration";
    case ExperimentKind::Dimension: return "dimension";
    case ExperimentKind::Example1: return "example1";
  }
  return "unknown";
}

const char* to_string(DecoderKind kind) {
  switch (kind) {
    case DecoderKind::Enumerate: return "enumerate";
    case DecoderKind::AltMin: return "altmin";
    case DecoderKind::SparseFactor: return "sparsefactor";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "phase") return ExperimentKind::Phase;
  if (name == "concentration") return ExperimentKind::Concentration;
  if (name == "dimension") return ExperimentKind::Dimension;
  if (name == "example1") return ExperimentKind::Example1;
  throw ConfigError("unknown experiment kind: " + name);
}

DecoderKind decoder_kind_from_string(const std::string& name) {
  if (name == "enumerate") return DecoderKind::Enumerate;
  if (name == "altmin") return DecoderKind::AltMin;
  if (name == "sparsefactor") return DecoderKind::SparseFactor;
  throw ConfigError("unknown decoder kind: " + name);
}

void validate(const ExperimentConfig& cfg) {
  try {
    if (cfg.m < 1 || cfg.n < 1) throw ConfigError("config: m, n must be >= 1");
    if (!(cfg.s > 0.0)) throw ConfigError("config: s must be positive");
    if (cfg.trials < 1) throw ConfigError("config: trials must be >= 1");
    if (cfg.workers < 1) throw ConfigError("config: workers must be >= 1");

    const bool phase_like = cfg.experiment == ExperimentKind::Phase ||
                            cfg.experiment == ExperimentKind::Example1;
    if (phase_like || cfg.experiment == ExperimentKind::Concentration) {
      if (cfg.k_min < 1) throw ConfigError("config: k_min must be >= 1");
    }
    if (phase_like) {
      if (cfg.k_min > cfg.k_max) throw ConfigError("config: k_min must be <= k_max");
      if (cfg.k_step < 1) throw ConfigError("config: k_step must be >= 1");
    }

    if (cfg.r < 0 || cfg.r > std::min(cfg.m, cfg.n)) {
      throw ConfigError("config: need 0 <= r <= min(m, n)");
    }
    if (cfg.experiment == ExperimentKind::Concentration ||
        (phase_like && cfg.decoder != DecoderKind::Enumerate)) {
      if (cfg.r < 1) throw ConfigError("config: this experiment needs r >= 1");
    }

    if (phase_like && cfg.decoder == DecoderKind::SparseFactor) {
      SupportSpec spec;
      spec.variant = SparseFactorSpec{cfg.m, cfg.n, cfg.r, cfg.l1, cfg.l2, 1.0};
      validate_spec(spec);
    }

    if (cfg.experiment == ExperimentKind::Dimension) {
      if (cfg.l1 > 0) {
        if (cfg.r < 1 || cfg.l1 < cfg.r || cfg.l1 > cfg.m) {
          throw ConfigError("config: factor-set dimension needs r <= l1 <= m");
        }
      } else if (cfg.r < 1 || cfg.r > std::min(cfg.m, cfg.n)) {
        throw ConfigError("config: need 1 <= r <= min(m, n)");
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
}

nlohmann::json config_identity_json(const ExperimentConfig& cfg) {
  return nlohmann::json{{"experiment", to_string(cfg.experiment)},
                        {"m", cfg.m},
                        {"n", cfg.n},
                        {"r", cfg.r},
                        {"l1", cfg.l1},
                        {"l2", cfg.l2},
                        {"ensemble", to_string(cfg.ensemble)},
                        {"s", cfg.s},
                        {"k_min", cfg.k_min},
                        {"k_max", cfg.k_max},
                        {"k_step", cfg.k_step},
                        {"trials", cfg.trials},
                        {"master_seed", cfg.master_seed},
                        {"decoder", to_string(cfg.decoder)}};
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j = config_identity_json(cfg);
  j["output_path"] = cfg.output_path;
  j["workers"] = cfg.workers;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const ExperimentConfig& base) {
  ExperimentConfig cfg = base;
  if (!j.is_object()) throw ConfigError("config json: expected an object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "experiment") cfg.experiment = experiment_kind_from_string(value.get<std::string>());
      else if (key == "m") cfg.m = value.get<int>();
      else if (key == "n") cfg.n = value.get<int>();
      else if (key == "r") cfg.r = value.get<int>();
      else if (key == "l1") cfg.l1 = value.get<int>();
      else if (key == "l2") cfg.l2 = value.get<int>();
      else if (key == "ensemble") cfg.ensemble = ensemble_kind_from_string(value.get<std::string>());
      else if (key == "s") cfg.s = value.get<double>();
      else if (key == "k_min") cfg.k_min = value.get<int>();
      else if (key == "k_max") cfg.k_max = value.get<int>();
      else if (key == "k_step") cfg.k_step = value.get<int>();
      else if (key == "trials") cfg.trials = value.get<long long>();
      else if (key == "master_seed") cfg.master_seed = value.get<std::uint64_t>();
      else if (key == "decoder") cfg.decoder = decoder_kind_from_string(value.get<std::string>());
      else if (key == "output_path") cfg.output_path = value.get<std::string>();
      else if (key == "workers") cfg.workers = value.get<int>();
      else throw ConfigError("config json: unknown key `" + key + "`");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const nlohmann::json::exception& err) {
    throw ConfigError(std::string("config json: ") + err.what());
  }
  return cfg;
}

ExperimentConfig example1_preset() {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::Example1;
  cfg.m = 8;
  cfg.n = 8;
  cfg.r = 1;
  cfg.l1 = 2;
  cfg.l2 = 2;
  cfg.ensemble = EnsembleKind::RankOne;
  cfg.k_min = 2;
  cfg.k_max = 8;
  cfg.k_step = 2;
  cfg.trials = 100;
  cfg.decoder = DecoderKind::SparseFactor;
  return cfg;
}

std::vector<SweepRecord> run_phase(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<SweepRecord> records;
  for (int k : sweep_ks(cfg)) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<TrialOutcome> slots(cfg.trials);
    parallel_for(cfg.trials, cfg.workers,
                 [&](long long t) { slots[t] = run_phase_trial(cfg, k, t); });

    SweepRecord rec;
    rec.k = k;
    rec.trials = cfg.trials;
    double rel_sum = 0.0;
    std::vector<long long> iters;
    iters.reserve(cfg.trials);
    for (const TrialOutcome& out : slots) {  // ordered reduction
      rec.successes += out.success ? 1 : 0;
      rec.budget_refusals += out.budget_refused ? 1 : 0;
      rel_sum += out.rel_error;
      iters.push_back(out.iterations);
    }
    rec.success_rate = static_cast<double>(rec.successes) / static_cast<double>(rec.trials);
    rec.mean_rel_err = rel_sum / static_cast<double>(rec.trials);
    std::sort(iters.begin(), iters.end());
    rec.median_iters = iters[(iters.size() - 1) / 2];
    rec.wall_seconds = 0.0;

    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
    std::cerr << "# sweep k=" << k << " wall=" << elapsed.count() << "s"
              << " successes=" << rec.successes << "/" << rec.trials;
    if (rec.budget_refusals) std::cerr << " budget_refusals=" << rec.budget_refusals;
    std::cerr << "\n";
    records.push_back(rec);
  }
  return records;
}

std::vector<BoundReport> run_concentration_for(const Matrix& x, double s,
                                               int k, long long trials,
                                               std::uint64_t seed,
                                               int workers) {
  require_finite(x, "run_concentration_for");
  const SvdResult dec = svd(x);
  if (dec.numerical_rank < 1) {
    throw std::invalid_argument("run_concentration_for: matrix must have rank >= 1");
  }
  const double delta_max = s * s * dec.singular_values(0);
  if (!(delta_max > kConcDeltaMin)) {
    throw std::invalid_argument("run_concentration_for: s^2 sigma_1 must exceed the grid floor");
  }
  std::vector<double> grid(kConcDeltaPoints);
  const double ratio = std::pow(delta_max / kConcDeltaMin,
                                1.0 / (kConcDeltaPoints - 1));
  for (int j = 0; j < kConcDeltaPoints; ++j) {
    grid[j] = kConcDeltaMin * std::pow(ratio, j);
  }
  grid.back() = delta_max;  // exact upper endpoint

  const std::vector<McEstimate> ests =
      mc_prob_grid(x, s, grid, trials, derive_seed(seed, kTagConcMc, 0, 0), workers);

  std::vector<BoundReport> rows;
  rows.reserve(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    BoundReport row;
    row.m = static_cast<int>(x.rows());
    row.n = static_cast<int>(x.cols());
    row.r = dec.numerical_rank;
    row.s = s;
    row.delta = grid[j];
    row.k = k;
    row.trials = trials;
    row.empirical_prob = ests[j].prob;
    row.ci_halfwidth = ests[j].ci_halfwidth;
    row.f_value = f_bound(x, s, grid[j]);
    row.d_exact = d_const(row.r, row.m, row.n);
    row.d_paper_bound = mincomp::d_paper_bound(row.r, row.m, row.n);
    row.single_bound = lemma_bound_single(x, s, grid[j]);
    row.k_bound = lemma_bound_k(x, s, grid[j], k);
    rows.push_back(row);
  }
  return rows;
}

std::vector<BoundReport> run_concentration(const ExperimentConfig& cfg) {
  validate(cfg);
  Rng rng(derive_seed(cfg.master_seed, kTagConcX, 0, 0));
  const Matrix u = gaussian_matrix(cfg.m, cfg.r, rng);
  const Matrix v = gaussian_matrix(cfg.n, cfg.r, rng);
  return run_concentration_for(u * v.transpose(), cfg.s, cfg.k_min, cfg.trials,
                               cfg.master_seed, cfg.workers);
}

std::vector<DimensionRun> run_dimension(const ExperimentConfig& cfg) {
  validate(cfg);
  DimensionRun run;
  const std::uint64_t seed = derive_seed(cfg.master_seed, kTagDim, 0, 0);
  const int count = static_cast<int>(cfg.trials);
  if (cfg.l1 > 0) {
    Rng rng(seed);
    std::vector<Matrix> pts;
    pts.reserve(count);
    for (int i = 0; i < count; ++i) {
      pts.push_back(sample_factor(cfg.r, cfg.m, cfg.l1, kPlantedFactorBound, rng));
    }
    run.estimate = estimate_dim(pts, kFactorDimRhoMin, kFactorDimRhoMax,
                                kFactorDimLevels);
    run.reference = static_cast<double>(cfg.l1) * cfg.r;
    run.label = "sparse_factor_set";
  } else {
    SupportSpec spec;
    spec.variant = LowRankSpec{cfg.m, cfg.n, cfg.r, kLowRankDimBound};
    const std::vector<Matrix> pts = sample_support(spec, count, seed);
    run.estimate = estimate_dim(pts, kLowRankDimRhoMin * kLowRankDimBound,
                                kLowRankDimRhoMax * kLowRankDimBound,
                                kLowRankDimLevels);
    run.reference = manifold_dim(cfg.m, cfg.n, cfg.r);
    run.label = "low_rank_set";
  }
  return {run};
}

std::string phase_csv(const std::vector<SweepRecord>& records,
                      const ExperimentConfig& cfg) {
  if (records.empty()) throw std::invalid_argument("phase_csv: no records");
  const nlohmann::json meta = config_identity_json(cfg);
  std::string out = meta_lines(&meta);
  out += "# reference_k=" + std::to_string(manifold_dim(cfg.m, cfg.n, cfg.r)) + "\n";
  out += "k,trials,successes,success_rate,mean_rel_err,median_iters,wall_seconds\n";
  for (const SweepRecord& rec : records) {
    out += std::to_string(rec.k) + "," + std::to_string(rec.trials) + "," +
           std::to_string(rec.successes) + "," + format_double(rec.success_rate) +
           "," + format_double(rec.mean_rel_err) + "," +
           std::to_string(rec.median_iters) + "," +
           format_double(rec.wall_seconds) + "\n";
  }
  return out;
}

std::string concentration_csv(const std::vector<BoundReport>& rows,
                              const nlohmann::json* config_meta) {
  if (rows.empty()) throw std::invalid_argument("concentration_csv: no rows");
  std::string out = meta_lines(config_meta);
  out += "m,n,r,s,delta,k,trials,empirical_prob,ci_halfwidth,f_value,"
         "d_exact,d_paper_bound,single_bound,k_bound\n";
  for (const BoundReport& row : rows) {
    out += std::to_string(row.m) + "," + std::to_string(row.n) + "," +
           std::to_string(row.r) + "," + format_double(row.s) + "," +
           format_double(row.delta) + "," + std::to_string(row.k) + "," +
           std::to_string(row.trials) + "," + format_double(row.empirical_prob) +
           "," + format_double(row.ci_halfwidth) + "," +
           format_double(row.f_value) + "," + format_double(row.d_exact) + "," +
           format_double(row.d_paper_bound) + "," +
           format_double(row.single_bound) + "," + format_double(row.k_bound) +
           "\n";
  }
  return out;
}

std::string dimension_csv(const DimensionRun& run,
                          const nlohmann::json* config_meta) {
  std::string out = meta_lines(config_meta);
  out += "rho,count\n";
  for (std::size_t j = 0; j < run.estimate.rho_schedule.size(); ++j) {
    out += format_double(run.estimate.rho_schedule[j]) + "," +
           std::to_string(run.estimate.counts[j]) + "\n";
  }
  out += "# slope=" + format_double(run.estimate.slope) +
         " reference=" + format_double(run.reference) +
         " r2=" + format_double(run.estimate.r2) + "\n";
  return out;
}

std::string phase_svg(const std::vector<SweepRecord>& records, int reference_k) {
  if (records.empty()) throw std::invalid_argument("phase_svg: no records");
  constexpr double width = 640, height = 400;
  constexpr double left = 60, right = 600, top = 40, bottom = 360;
  const double k_lo = records.front().k;
  const double k_hi = std::max<double>(records.back().k, k_lo + 1);
  const auto x_of = [&](double k) {
    return left + (right - left) * (k - k_lo) / (k_hi - k_lo);
  };
  const auto y_of = [&](double rate) { return bottom - (bottom - top) * rate; };

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
      "viewBox=\"0 0 640 400\">\n"
      "<rect x=\"0\" y=\"0\" width=\"640\" height=\"400\" fill=\"white\"/>\n";
  svg += "<line x1=\"" + format_double(left) + "\" y1=\"" + format_double(bottom) +
         "\" x2=\"" + format_double(right) + "\" y2=\"" + format_double(bottom) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + format_double(left) + "\" y1=\"" + format_double(top) +
         "\" x2=\"" + format_double(left) + "\" y2=\"" + format_double(bottom) +
         "\" stroke=\"black\"/>\n";
  for (double rate : {0.0, 0.5, 1.0}) {
    svg += "<text x=\"" + format_double(left - 36) + "\" y=\"" +
           format_double(y_of(rate) + 4) + "\" font-size=\"12\">" +
           format_double(rate) + "</text>\n";
  }
  for (const SweepRecord& rec : records) {
    svg += "<text x=\"" + format_double(x_of(rec.k) - 6) + "\" y=\"" +
           format_double(bottom + 18) + "\" font-size=\"12\">" +
           std::to_string(rec.k) + "</text>\n";
  }
  if (reference_k >= k_lo && reference_k <= k_hi) {
    const std::string x = format_double(x_of(reference_k));
    svg += "<line x1=\"" + x + "\" y1=\"" + format_double(top) + "\" x2=\"" + x +
           "\" y2=\"" + format_double(bottom) +
           "\" stroke=\"red\" stroke-dasharray=\"6,4\"/>\n";
    svg += "<text x=\"" + format_double(x_of(reference_k) + 4) + "\" y=\"" +
           format_double(top + 12) + "\" font-size=\"12\" fill=\"red\">k*=" +
           std::to_string(reference_k) + "</text>\n";
  }
  std::string points;
  for (const SweepRecord& rec : records) {
    if (!points.empty()) points += " ";
    points += format_double(x_of(rec.k)) + "," + format_double(y_of(rec.success_rate));
  }
  svg += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"" +
         points + "\"/>\n";
  svg += "<text x=\"" + format_double(left) + "\" y=\"" + format_double(top - 16) +
         "\" font-size=\"14\">success rate vs k</text>\n";
  svg += "</svg>\n";
  return svg;
}

namespace {

std::string svg_path_for(const std::string& csv_path) {
  const auto dot = csv_path.rfind('.');
  const auto slash = csv_path.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return csv_path + ".svg";
  }
  return csv_path.substr(0, dot) + ".svg";
}

void deliver(const std::string& content, const std::string& path) {
  if (path.empty()) {
    std::cout << content;
  } else {
    write_file(path, content);
  }
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  switch (cfg.experiment) {
    case ExperimentKind::Phase:
    case ExperimentKind::Example1: {
      const std::vector<SweepRecord> records = run_phase(cfg);
      deliver(phase_csv(records, cfg), cfg.output_path);
      if (!cfg.output_path.empty()) {
        write_file(svg_path_for(cfg.output_path),
                   phase_svg(records, manifold_dim(cfg.m, cfg.n, cfg.r)));
      }
      break;
    }
    case ExperimentKind::Concentration: {
      const nlohmann::json meta = config_identity_json(cfg);
      deliver(concentration_csv(run_concentration(cfg), &meta), cfg.output_path);
      break;
    }
    case ExperimentKind::Dimension: {
      const nlohmann::json meta = config_identity_json(cfg);
      const std::vector<DimensionRun> runs = run_dimension(cfg);
      deliver(dimension_csv(runs.front(), &meta), cfg.output_path);
      break;
    }
  }
}

}  // namespace mincomp
