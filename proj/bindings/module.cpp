// Python bindings for the mincomp core. The surface mirrors the C++ API
// one-to-one; JSON crosses the boundary as strings and experiment runs
// return the same CSV bytes the CLI writes, so Python-side results are
// byte-comparable with CLI output.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "mincomp/concentration.hpp"
#include "mincomp/experiments.hpp"
#include "mincomp/io.hpp"
#include "mincomp/linalg.hpp"
#include "mincomp/measurement.hpp"
#include "mincomp/recovery.hpp"
#include "mincomp/rng.hpp"
#include "mincomp/support.hpp"

namespace py = pybind11;
using namespace mincomp;

namespace {

// Validates first, then produces exactly the CSV run_experiment would write
// (SVG sidecars are a CLI concern; Python callers plot from the records).
std::string run_config_json(const std::string& config_json) {
  const ExperimentConfig cfg =
      config_from_json(nlohmann::json::parse(config_json));
  validate(cfg);
  switch (cfg.experiment) {
    case ExperimentKind::Phase:
    case ExperimentKind::Example1:
      return phase_csv(run_phase(cfg), cfg);
    case ExperimentKind::Concentration: {
      const nlohmann::json meta = config_identity_json(cfg);
      return concentration_csv(run_concentration(cfg), &meta);
    }
    case ExperimentKind::Dimension: {
      const nlohmann::json meta = config_identity_json(cfg);
      return dimension_csv(run_dimension(cfg).front(), &meta);
    }
  }
  throw std::logic_error("unhandled experiment kind");
}

const char* spec_kind(const SupportSpec& spec) {
  if (std::holds_alternative<LowRankSpec>(spec.variant)) return "low_rank";
  if (std::holds_alternative<SparseFactorSpec>(spec.variant))
    return "sparse_factor";
  return "point_cloud";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Matrix completion toolkit: seeded measurement ensembles, decoders, "
      "box-counting dimension estimation, and concentration-bound checks.";

  m.attr("RNG_ALGORITHM") = kRngAlgorithm;
  m.attr("Z99") = kZ99;

  py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  // ---- linalg ----
  py::class_<SvdResult>(m, "SvdResult")
      .def_readonly("singular_values", &SvdResult::singular_values)
      .def_readonly("left_factors", &SvdResult::left_factors)
      .def_readonly("right_factors", &SvdResult::right_factors)
      .def_readonly("numerical_rank", &SvdResult::numerical_rank);

  m.def("trace_inner", &trace_inner, py::arg("a"), py::arg("b"),
        "tr(a^T b); the induced norm is the Frobenius norm.");
  m.def("svd", &svd, py::arg("x"), py::arg("rank_tol") = 1e-10,
        "Deterministic-sign SVD with numerical rank against rank_tol.");
  m.def("delta_product", &delta_product, py::arg("x"),
        py::arg("rank_tol") = 1e-10,
        "Product of singular values down to the numerical rank.");
  m.def("ball_volume", &ball_volume, py::arg("k"), py::arg("s"),
        "Volume of the k-ball of radius s; V(0, s) = 1.");
  m.def("sphere_area", &sphere_area, py::arg("k_minus_1"), py::arg("s"),
        "Surface area A(k-1, s) of the k-ball of radius s.");
  m.def("format_double", &format_double, py::arg("v"),
        "Shortest round-trip decimal form; the CSV/SVG double formatter.");

  // ---- rng ----
  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("next_u64", &Rng::next_u64)
      .def("uniform01", &Rng::uniform01)
      .def("uniform_open01", &Rng::uniform_open01)
      .def("normal", &Rng::normal);
  m.def("mix64", &mix64, py::arg("x"));
  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("tag"),
        py::arg("a"), py::arg("b"),
        "Order-sensitive stream seed for work item (a, b) under a tag.");

  // ---- measurement ----
  py::enum_<EnsembleKind>(m, "EnsembleKind")
      .value("Dense", EnsembleKind::Dense)
      .value("RankOne", EnsembleKind::RankOne);
  m.def("ensemble_kind_from_string", &ensemble_kind_from_string,
        py::arg("name"));
  m.def("ensemble_kind_to_string",
        [](EnsembleKind kind) { return std::string(to_string(kind)); },
        py::arg("kind"));

  py::class_<MeasurementEnsemble>(m, "MeasurementEnsemble")
      .def_readonly("kind", &MeasurementEnsemble::kind)
      .def_readonly("m", &MeasurementEnsemble::m)
      .def_readonly("n", &MeasurementEnsemble::n)
      .def_readonly("k", &MeasurementEnsemble::k)
      .def_readonly("s", &MeasurementEnsemble::s)
      .def_readonly("seed", &MeasurementEnsemble::seed)
      .def_readonly("mats", &MeasurementEnsemble::mats)
      .def_readonly("lefts", &MeasurementEnsemble::lefts)
      .def_readonly("rights", &MeasurementEnsemble::rights)
      .def("apply", [](const MeasurementEnsemble& e,
                       const Matrix& x) { return apply(e, x); },
           py::arg("x"), "The k functional values <A_i, x>.")
      .def("apply_factored",
           [](const MeasurementEnsemble& e, const Matrix& u, const Matrix& v) {
             return apply_factored(e, u, v);
           },
           py::arg("u"), py::arg("v"),
           "apply on x = u v^T without materializing x.")
      .def("storage_cost",
           [](const MeasurementEnsemble& e) { return storage_cost(e); },
           "Stored reals: dense k*m*n, rank-one k*(m+n).")
      .def("to_json",
           [](const MeasurementEnsemble& e) { return ensemble_to_json(e).dump(); },
           "Seed-tuple serialization; entries regenerate on load.");

  m.def("sample_ensemble", &sample_ensemble, py::arg("kind"), py::arg("m"),
        py::arg("n"), py::arg("k"), py::arg("s"), py::arg("seed"),
        "k functionals drawn uniformly from radius-s balls.");
  m.def("ensemble_from_json",
        [](const std::string& text) {
          return ensemble_from_json(nlohmann::json::parse(text));
        },
        py::arg("text"));
  m.def("sample_uniform_ball",
        [](int dim, double s, Rng& rng) {
          return sample_uniform_ball(dim, s, rng);
        },
        py::arg("dim"), py::arg("s"), py::arg("rng"),
        "Uniform draw from the ball of radius s in R^dim.");

  // ---- support sets and dimension ----
  py::class_<SupportSpec>(m, "SupportSpec")
      .def_static(
          "low_rank",
          [](int m, int n, int r, double L, double epsilon) {
            SupportSpec spec;
            spec.variant = LowRankSpec{m, n, r, L};
            spec.epsilon = epsilon;
            return spec;
          },
          py::arg("m"), py::arg("n"), py::arg("r"), py::arg("L") = 1.0,
          py::arg("epsilon") = 0.01,
          "Rank <= r matrices with Frobenius norm <= L.")
      .def_static(
          "sparse_factor",
          [](int m, int n, int r, int l1, int l2, double L, double epsilon) {
            SupportSpec spec;
            spec.variant = SparseFactorSpec{m, n, r, l1, l2, L};
            spec.epsilon = epsilon;
            return spec;
          },
          py::arg("m"), py::arg("n"), py::arg("r"), py::arg("l1"),
          py::arg("l2"), py::arg("L") = 10.0, py::arg("epsilon") = 0.01,
          "Products X1^T X2 with column-sparse factors.")
      .def_static(
          "point_cloud",
          [](const std::vector<Matrix>& points, double epsilon) {
            SupportSpec spec;
            spec.variant = PointCloudSpec{points};
            spec.epsilon = epsilon;
            return spec;
          },
          py::arg("points"), py::arg("epsilon") = 0.01,
          "An explicit finite set of same-shape matrices.")
      .def_property_readonly("kind", &spec_kind)
      .def_readwrite("epsilon", &SupportSpec::epsilon);

  m.def("validate_spec", &validate_spec, py::arg("spec"));
  m.def("manifold_dim", &manifold_dim, py::arg("m"), py::arg("n"),
        py::arg("r"), "(m + n - r) r, the rank-r stratum dimension.");
  m.def("sample_support", &sample_support, py::arg("spec"), py::arg("count"),
        py::arg("seed"), py::call_guard<py::gil_scoped_release>());
  m.def("gaussian_matrix",
        [](int rows, int cols, Rng& rng) {
          return gaussian_matrix(rows, cols, rng);
        },
        py::arg("rows"), py::arg("cols"), py::arg("rng"),
        "i.i.d. standard normal entries, column-major fill order.");
  m.def("sample_factor",
        [](int r, int m, int l, double L, Rng& rng) {
          return sample_factor(r, m, l, L, rng);
        },
        py::arg("r"), py::arg("m"), py::arg("l"), py::arg("L"), py::arg("rng"),
        "r x m factor with exactly l nonzero columns, norm < L.");
  m.def("covering_count", &covering_count, py::arg("points"), py::arg("rho"),
        "Occupied origin-anchored cells with diagonal exactly 2*rho.");

  py::class_<DimensionEstimate>(m, "DimensionEstimate")
      .def_readonly("rho_schedule", &DimensionEstimate::rho_schedule)
      .def_readonly("counts", &DimensionEstimate::counts)
      .def_readonly("slope", &DimensionEstimate::slope)
      .def_readonly("r2", &DimensionEstimate::r2);

  m.def("estimate_dim", &estimate_dim, py::arg("points"), py::arg("rho_min"),
        py::arg("rho_max"), py::arg("levels"),
        py::call_guard<py::gil_scoped_release>(),
        "Box-counting slope over a geometric radius schedule.");
  m.def("cloud_to_csv", &cloud_to_csv, py::arg("points"));
  m.def("cloud_from_csv", &cloud_from_csv, py::arg("text"));

  // ---- concentration ----
  m.def("d_const", &d_const, py::arg("r"), py::arg("m"), py::arg("n"),
        "Exact dimensional constant from ball-volume ratios.");
  m.def("d_paper_bound", &d_paper_bound, py::arg("r"), py::arg("m"),
        py::arg("n"),
        "Simplified comparison value 2^((m+n)/2 - r); not always an upper "
        "bound for d_const.");
  m.def("f_bound", &f_bound, py::arg("x"), py::arg("s"), py::arg("delta"),
        py::arg("rank_tol") = 1e-10);
  m.def("lemma_bound_single_raw", &lemma_bound_single_raw, py::arg("x"),
        py::arg("s"), py::arg("delta"));
  m.def("lemma_bound_single", &lemma_bound_single, py::arg("x"), py::arg("s"),
        py::arg("delta"), "delta * D * f clipped into [0, 1].");
  m.def("lemma_bound_k", &lemma_bound_k, py::arg("x"), py::arg("s"),
        py::arg("delta"), py::arg("k"),
        "k-measurement bound with the simplified constant.");
  m.def("wilson_halfwidth", &wilson_halfwidth, py::arg("hits"),
        py::arg("trials"), py::arg("z") = kZ99);

  py::class_<McEstimate>(m, "McEstimate")
      .def_readonly("prob", &McEstimate::prob)
      .def_readonly("ci_halfwidth", &McEstimate::ci_halfwidth)
      .def_readonly("hits", &McEstimate::hits)
      .def_readonly("trials", &McEstimate::trials);

  m.def("mc_prob_single", &mc_prob_single, py::arg("x"), py::arg("s"),
        py::arg("delta"), py::arg("trials"), py::arg("seed"),
        py::arg("workers") = 1, py::call_guard<py::gil_scoped_release>(),
        "Empirical P[|a^T x b| <= delta]; worker-count independent.");
  m.def("mc_prob_grid", &mc_prob_grid, py::arg("x"), py::arg("s"),
        py::arg("deltas"), py::arg("trials"), py::arg("seed"),
        py::arg("workers") = 1, py::call_guard<py::gil_scoped_release>(),
        "Coupled-draw estimates, exactly monotone across the delta grid.");
  m.def("perturbation_gap", &perturbation_gap, py::arg("ensemble"),
        py::arg("x"), py::arg("x_center"),
        "(lhs, rhs) of the rank-one perturbation inequality; lhs <= rhs.");

  // ---- recovery ----
  py::enum_<Outcome>(m, "Outcome")
      .value("Recovered", Outcome::Recovered)
      .value("Ambiguous", Outcome::Ambiguous)
      .value("NoCandidate", Outcome::NoCandidate)
      .value("NotConverged", Outcome::NotConverged);
  m.def("outcome_to_string",
        [](Outcome o) { return std::string(to_string(o)); }, py::arg("o"));

  py::class_<DecodeResult>(m, "DecodeResult")
      .def_readonly("outcome", &DecodeResult::outcome)
      .def_readonly("x_hat", &DecodeResult::x_hat)
      .def_readonly("has_estimate", &DecodeResult::has_estimate)
      .def_readonly("iterations", &DecodeResult::iterations)
      .def_readonly("residual", &DecodeResult::residual)
      .def_readonly("rel_error", &DecodeResult::rel_error)
      .def_readonly("has_rel_error", &DecodeResult::has_rel_error)
      .def_readonly("ridge_fallbacks", &DecodeResult::ridge_fallbacks)
      .def_readonly("candidate_index", &DecodeResult::candidate_index)
      .def_readonly("num_matches", &DecodeResult::num_matches)
      .def("to_json",
           [](const DecodeResult& r) { return result_to_json(r).dump(); });

  py::class_<AltMinOptions> altmin_opts(m, "AltMinOptions");
  py::enum_<AltMinOptions::Init>(altmin_opts, "Init")
      .value("Random", AltMinOptions::Init::Random)
      .value("Spectral", AltMinOptions::Init::Spectral);
  altmin_opts
      .def(py::init([](int r, int max_iters, double tol, int restarts,
                       AltMinOptions::Init init, double success_rel_err,
                       std::uint64_t seed) {
             AltMinOptions opts;
             opts.r = r;
             opts.max_iters = max_iters;
             opts.tol = tol;
             opts.restarts = restarts;
             opts.init = init;
             opts.success_rel_err = success_rel_err;
             opts.seed = seed;
             return opts;
           }),
           py::arg("r") = 1, py::arg("max_iters") = 500,
           py::arg("tol") = 1e-10, py::arg("restarts") = 10,
           py::arg("init") = AltMinOptions::Init::Random,
           py::arg("success_rel_err") = 1e-4, py::arg("seed") = 0)
      .def_readwrite("r", &AltMinOptions::r)
      .def_readwrite("max_iters", &AltMinOptions::max_iters)
      .def_readwrite("tol", &AltMinOptions::tol)
      .def_readwrite("restarts", &AltMinOptions::restarts)
      .def_readwrite("init", &AltMinOptions::init)
      .def_readwrite("success_rel_err", &AltMinOptions::success_rel_err)
      .def_readwrite("seed", &AltMinOptions::seed);
  m.def("validate_altmin_options",
        [](const AltMinOptions& opts) { validate(opts); }, py::arg("opts"));

  m.def("decode_enumerate", &decode_enumerate, py::arg("ensemble"),
        py::arg("y"), py::arg("candidates"), py::arg("tol"),
        py::call_guard<py::gil_scoped_release>(),
        "Unique candidate within residual tol, or a typed failure.");
  m.def("decode_altmin", &decode_altmin, py::arg("ensemble"), py::arg("y"),
        py::arg("opts"), py::call_guard<py::gil_scoped_release>(),
        "Rank-constrained alternating least squares with restarts.");
  m.def("decode_sparse_factor", &decode_sparse_factor, py::arg("ensemble"),
        py::arg("y"), py::arg("r"), py::arg("l1"), py::arg("l2"),
        py::arg("opts"), py::arg("budget") = 1000000LL,
        py::call_guard<py::gil_scoped_release>(),
        "Column-support enumeration with restricted alternating fits.");

  py::class_<ProbeResult>(m, "ProbeResult")
      .def_readonly("min_gap", &ProbeResult::min_gap)
      .def_readonly("collisions", &ProbeResult::collisions)
      .def_readonly("pairs", &ProbeResult::pairs);

  m.def("injectivity_probe", &injectivity_probe, py::arg("ensemble"),
        py::arg("spec"), py::arg("trials"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>(),
        "Sampled-difference probe of the measurement map.");
  m.def("injectivity_exhaustive", &injectivity_exhaustive, py::arg("ensemble"),
        py::arg("points"), py::call_guard<py::gil_scoped_release>(),
        "All-pairs probe over an explicit cloud.");
  m.def("attach_truth",
        [](DecodeResult& result, const Matrix& truth) {
          attach_truth(result, truth);
          return result;
        },
        py::arg("result"), py::arg("truth"),
        "Scores the result against the planted matrix; returns it.");

  // ---- experiments ----
  m.def("run_config_json", &run_config_json, py::arg("config_json"),
        py::call_guard<py::gil_scoped_release>(),
        "Runs the experiment described by a config JSON string and returns "
        "the CSV exactly as the CLI would write it.");
  m.def("example1_config_json",
        []() { return config_to_json(example1_preset()).dump(); },
        "The preset sparse-factor sweep config as a JSON string.");
}
