// maxlsh: batch CLI over the library. Every subcommand reads matrices from
// CSV, prints one JSON run report to stdout (stable alphabetical key order)
// and logs to stderr. Exit codes: 0 for ok and infeasible (infeasible is a
// result, not a failure), 2 for too-large, 3 for solver failures, 64 for
// usage errors including malformed CSV.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "maxlsh/maxlsh.hpp"

using json = nlohmann::json;
using namespace maxlsh;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTooLarge = 2;
constexpr int kExitSolverFailure = 3;
constexpr int kExitUsage = 64;

struct RunReport {
  std::string command;
  json params = json::object();
  json results = json::object();
  std::uint64_t seed = 0;
  Status status = Status::ok;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  int emit() {
    const auto elapsed = std::chrono::steady_clock::now() - started;
    json doc;
    doc["schema"] = 1;
    doc["command"] = command;
    doc["params"] = params;
    doc["results"] = results;
    doc["seed"] = seed;
    doc["status"] = to_string(status);
    doc["wall_time_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    std::cout << doc.dump(2) << "\n";
    switch (status) {
      case Status::ok:
      case Status::infeasible: return kExitOk;
      case Status::too_large: return kExitTooLarge;
      case Status::solver_failure: return kExitSolverFailure;
    }
    return kExitSolverFailure;
  }
};

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix random_half_integer(int n, int m, std::uint64_t seed, std::uint64_t stream) {
  // integer entries in {-2..2} scaled by 1/2: exact LP arithmetic on small
  // rationals, both signs stressed
  Rng rng(seed, stream);
  Matrix z(n, m);
  for (double& v : z.data()) v = 0.5 * (static_cast<double>(static_cast<int>(rng.below(5))) - 2.0);
  return z;
}

struct SandwichRow {
  double t = 0, t_centered = 0, rho2 = 0, rho_mid = 0, rho_inf = 0, rho2_centered = 0;
  bool holds = false;
};

SandwichRow theorem1_sandwich(const SimMatrix& z, const SolverConfig& cfg, std::uint64_t cap,
                              double tol) {
  SandwichRow row;
  const int k_inf = z.rows() + z.cols();
  EnumerationOptions opt;
  opt.cap = cap;
  row.t = max_norm(z, cfg).t;
  row.t_centered = centered_max_norm(z, cfg).value;
  row.rho2 = cluster_ratio(z, 2, false, opt).value;
  row.rho_mid = cluster_ratio(z, 3, false, opt).value;
  row.rho_inf = cluster_ratio(z, k_inf, false, opt).value;
  row.rho2_centered = cluster_ratio(z, 2, true, opt).value;
  const double kr = krivine_constant();
  row.holds = row.t / 3.0 <= row.rho_inf + tol && row.rho_inf <= row.rho_mid + 1e-9 &&
              row.rho_mid <= row.rho2 + 1e-9 && row.rho2 <= kr * row.t + tol &&
              row.t_centered / 2.0 <= row.rho2_centered + tol &&
              row.rho2_centered <= kr * row.t_centered + tol;
  return row;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"convex relaxations of clustering, max-norm factorization, and ALSH construction"};
  app.require_subcommand(1);

  std::string input, output, corpus = "random";
  std::uint64_t seed = 1, cap = std::uint64_t{1} << 20;
  int k = 2, rank = 0, restarts = 8, big_k = 2, samples = 100000, dims = 1024;
  int n = 4, d = 8, trials = 500, count = 20, size = 3, m = 0;
  double fit_tol = 1e-6, delta = 0.1, t_window = 0.2, c0 = 1.0, constant = 1.0;
  bool centralized = false;
  std::string per_trial_csv, backend = "gram";

  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("--input", input, "matrix CSV file")->required();
  };
  auto add_solver = [&](CLI::App* cmd) {
    cmd->add_option("--rank", rank, "factor rank (0 = rows+cols)");
    cmd->add_option("--restarts", restarts, "seeded solver restarts");
    cmd->add_option("--seed", seed, "RNG seed")->envname("MAXLSH_SEED");
    cmd->add_option("--fit-tol", fit_tol, "residual tolerance factor");
  };

  auto* cmd_maxnorm = app.add_subcommand("maxnorm", "max-norm of a matrix with witness");
  add_input(cmd_maxnorm);
  add_solver(cmd_maxnorm);

  auto* cmd_cmaxnorm = app.add_subcommand("centered-maxnorm", "centralized max-norm min_theta");
  add_input(cmd_cmaxnorm);
  add_solver(cmd_cmaxnorm);

  auto* cmd_ratio = app.add_subcommand("ratio", "exact cluster ratio by LP over incidence matrices");
  add_input(cmd_ratio);
  cmd_ratio->add_option("--k", k, "alphabet size (>= 2)");
  cmd_ratio->add_flag("--centralized", centralized, "free shift variable");
  cmd_ratio->add_option("--cap", cap, "enumeration cap on k^n * k^m");

  auto* cmd_alsh = app.add_subcommand("alsh", "asymmetric LSH sampler operations");
  cmd_alsh->require_subcommand(1);
  for (const char* sub : {"build", "sample", "verify", "embed"}) {
    auto* c = cmd_alsh->add_subcommand(sub);
    add_input(c);
    c->add_flag("--centralized", centralized, "center the target first");
    c->add_option("--K", big_k, "Krivine truncation order");
    c->add_option("--seed", seed, "RNG seed")->envname("MAXLSH_SEED");
    c->add_option("--samples", samples, "Monte Carlo draws");
    c->add_option("--d", dims, "embedding length");
    c->add_option("--backend", backend, "gaussian backend: gram or dense");
  }

  auto* cmd_check = app.add_subcommand("check", "symmetric LSH feasibility diagnostics");
  add_input(cmd_check);
  cmd_check->add_option("--constant", constant, "constant C of the eigenvalue upper bound");

  auto* cmd_randexp = app.add_subcommand("randexp", "random Gram matrix experiments");
  cmd_randexp->require_subcommand(1);
  for (const char* sub : {"metric", "eigen", "lsh-pre"}) {
    auto* c = cmd_randexp->add_subcommand(sub);
    c->add_option("--n", n, "number of vectors");
    c->add_option("--d", d, "ambient dimension");
    c->add_option("--trials", trials, "Monte Carlo trials");
    c->add_option("--seed", seed, "RNG seed")->envname("MAXLSH_SEED");
    c->add_option("--delta", delta, "failure budget of the metric lemma");
    c->add_option("--t", t_window, "eigenvalue window half-width");
    c->add_option("--c0", c0, "precondition constant C0");
    c->add_option("--per-trial-csv", per_trial_csv, "write per-trial stats to CSV");
  }

  auto* cmd_gen = app.add_subcommand("gen", "emit matrices to CSV");
  cmd_gen->require_subcommand(1);
  {
    auto* c = cmd_gen->add_subcommand("theorem2", "2I plus the half-block sign matrix");
    c->add_option("--n", n, "size (even)")->required();
    c->add_option("--out", output, "output CSV path")->required();
  }
  {
    auto* c = cmd_gen->add_subcommand("gram", "Gram matrix of random unit vectors");
    c->add_option("--n", n, "number of vectors")->required();
    c->add_option("--d", d, "ambient dimension")->required();
    c->add_option("--seed", seed, "RNG seed")->envname("MAXLSH_SEED");
    c->add_option("--out", output, "output CSV path")->required();
  }
  {
    auto* c = cmd_gen->add_subcommand("random", "half-integer corpus matrix");
    c->add_option("--n", n, "rows")->required();
    c->add_option("--m", m, "cols (defaults to rows)");
    c->add_option("--seed", seed, "RNG seed")->envname("MAXLSH_SEED");
    c->add_option("--out", output, "output CSV path")->required();
  }

  auto* cmd_verify1 = app.add_subcommand("verify-theorem1",
                                         "run the full ratio/max-norm sandwich on a corpus");
  cmd_verify1->add_option("--corpus", corpus, "corpus kind (random)");
  cmd_verify1->add_option("--count", count, "number of matrices");
  cmd_verify1->add_option("--size", size, "matrix size");
  cmd_verify1->add_option("--seed", seed, "RNG seed")->envname("MAXLSH_SEED");
  cmd_verify1->add_option("--cap", cap, "enumeration cap")->default_val(std::uint64_t{1} << 26);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  RunReport rep;
  rep.seed = seed;
  try {
    SolverConfig cfg;
    cfg.rank = rank;
    cfg.restarts = restarts;
    cfg.seed = seed;
    cfg.fit_tol_factor = fit_tol;

    if (cmd_maxnorm->parsed()) {
      rep.command = "maxnorm";
      rep.params = {{"input", input}, {"rank", rank}, {"restarts", restarts}, {"fit_tol", fit_tol}};
      SimMatrix z(read_csv_file(input));
      Factorization f = max_norm(z, cfg);
      rep.results = {{"t", f.t},
                     {"residual", f.residual},
                     {"residual_tolerance", fit_tol * std::max(1.0, z.values.max_abs())},
                     {"rank", f.U.cols()}};
    } else if (cmd_cmaxnorm->parsed()) {
      rep.command = "centered-maxnorm";
      rep.params = {{"input", input}, {"rank", rank}, {"restarts", restarts}, {"fit_tol", fit_tol}};
      SimMatrix z(read_csv_file(input));
      CenteredMaxNorm c = centered_max_norm(z, cfg);
      rep.results = {{"value", c.value},
                     {"theta", c.theta},
                     {"residual", c.inner.residual},
                     {"residual_tolerance",
                      fit_tol * std::max(1.0, z.values.max_abs() + std::abs(c.theta))}};
    } else if (cmd_ratio->parsed()) {
      rep.command = "ratio";
      rep.params = {{"input", input}, {"k", k}, {"centralized", centralized}, {"cap", cap}};
      SimMatrix z(read_csv_file(input));
      EnumerationOptions opt;
      opt.cap = cap;
      RatioCertificate cert = cluster_ratio(z, k, centralized, opt);
      rep.status = cert.status;
      rep.results = {{"value", cert.value},
                     {"theta", cert.theta},
                     {"support_size", cert.weights.size()},
                     {"dual_value", cert.dual_value},
                     {"replay_residual", certificate_residual(cert, z)},
                     {"replay_tolerance", 1e-7}};
    } else if (cmd_alsh->parsed()) {
      CLI::App* sub = cmd_alsh->get_subcommands().front();
      rep.command = "alsh " + sub->get_name();
      rep.params = {{"input", input}, {"centralized", centralized}, {"K", big_k},
                    {"samples", samples}, {"d", dims}, {"backend", backend}};
      SimMatrix z(read_csv_file(input));
      const GaussianBackend gb =
          backend == "dense" ? GaussianBackend::dense : GaussianBackend::gram;
      AlshSampler s = build_alsh(z, centralized, big_k, seed, cfg, gb);
      rep.results = {{"alpha", s.alpha},
                     {"theta", s.theta},
                     {"t", s.base.t},
                     {"residual", s.base.residual},
                     {"norm_partial", s.norm_partial},
                     {"exact_zero", s.exact_zero}};
      if (sub->get_name() == "sample") {
        json pairs = json::array();
        const int shown = std::min(samples, 64);
        for (int i = 0; i < shown; ++i) {
          IncidencePair p = sample_pair(s, static_cast<std::uint64_t>(i));
          pairs.push_back({{"f", p.f.labels}, {"g", p.g.labels}});
        }
        rep.results["pairs"] = std::move(pairs);
      } else if (sub->get_name() == "verify") {
        UnbiasednessReport v = verify_unbiasedness(s, z, samples);
        rep.results["max_abs_deviation"] = v.max_abs_deviation;
        rep.results["hoeffding_band"] = v.hoeffding_band;
        rep.results["bias_allowance"] = v.bias_allowance;
        rep.results["within_band"] = v.within_band;
        rep.results["samples"] = v.samples;
        rep.results["skipped"] = v.skipped;
      } else if (sub->get_name() == "embed") {
        if (s.exact_zero) {
          rep.results["skipped"] = true;
        } else {
          EmbeddingErrorReport e = verify_embedding_error(s, z, dims, 1);
          rep.results["mse"] = e.mse;
          rep.results["mse_bound"] = e.mse_bound;
          HammingEmbedding emb = embed(s, dims);
          json fcodes = json::array(), gcodes = json::array();
          for (const auto& row : emb.F) fcodes.push_back(row);
          for (const auto& row : emb.G) gcodes.push_back(row);
          if (dims <= 64) {
            rep.results["F"] = std::move(fcodes);
            rep.results["G"] = std::move(gcodes);
          }
        }
      }
    } else if (cmd_check->parsed()) {
      rep.command = "check";
      rep.params = {{"input", input}, {"constant", constant}};
      SimMatrix z(read_csv_file(input));
      LshFeasibilityReport r = check_lsh_feasibility(z, constant);
      rep.results["triangle_ok"] = r.triangle_ok;
      if (r.obtuse_triple)
        rep.results["obtuse_triple"] = {(*r.obtuse_triple)[0], (*r.obtuse_triple)[1],
                                        (*r.obtuse_triple)[2]};
      rep.results["cut_cone_status"] = r.cut_cone_status == Status::too_large
                                           ? "skipped"
                                           : to_string(r.cut_cone_status);
      if (r.symmetric_alpha) rep.results["symmetric_alpha"] = *r.symmetric_alpha;
      rep.results["generalized_alpha_upper"] = r.generalized_alpha_upper;
      rep.results["generalized_alpha_lower"] = {
          {"alpha_shift_reading", r.generalized_alpha_lower.alpha_shift_reading},
          {"alpha_diag_reading", r.generalized_alpha_lower.alpha_diag_reading},
          {"theta", r.generalized_alpha_lower.theta},
          {"gamma", r.generalized_alpha_lower.gamma}};
    } else if (cmd_randexp->parsed()) {
      CLI::App* sub = cmd_randexp->get_subcommands().front();
      rep.command = "randexp " + sub->get_name();
      ExperimentReport r;
      if (sub->get_name() == "metric") {
        rep.params = {{"n", n}, {"d", d}, {"trials", trials}, {"delta", delta}};
        r = metric_probability_experiment(n, d, trials, seed, delta);
      } else if (sub->get_name() == "eigen") {
        rep.params = {{"n", n}, {"d", d}, {"trials", trials}, {"t", t_window}};
        r = eigenvalue_experiment(n, d, t_window, trials, seed);
      } else {
        rep.params = {{"n", n}, {"d", d}, {"trials", trials}, {"c0", c0}};
        r = random_lsh_precondition(n, d, c0, trials, seed);
      }
      rep.results = {{"fraction", r.fraction_metric},
                     {"lambda_min", {{"min", r.lambda_min_stats.min},
                                     {"mean", r.lambda_min_stats.mean},
                                     {"max", r.lambda_min_stats.max}}},
                     {"bound_params", r.bound_params},
                     {"pass", r.pass}};
      if (!per_trial_csv.empty()) {
        std::ofstream out(per_trial_csv);
        if (!out) throw std::runtime_error("cannot open '" + per_trial_csv + "' for writing");
        for (std::size_t i = 0; i < r.trial_lambda_min.size(); ++i)
          out << static_cast<int>(r.trial_success[i]) << ','
              << format_double(r.trial_lambda_min[i]) << '\n';
        rep.results["per_trial_csv"] = per_trial_csv;
      }
    } else if (cmd_gen->parsed()) {
      CLI::App* sub = cmd_gen->get_subcommands().front();
      rep.command = "gen " + sub->get_name();
      Matrix out_matrix;
      if (sub->get_name() == "theorem2") {
        rep.params = {{"n", n}, {"out", output}};
        out_matrix = theorem2_matrix(n).values;
      } else if (sub->get_name() == "gram") {
        rep.params = {{"n", n}, {"d", d}, {"out", output}};
        out_matrix = gram_matrix(random_unit_vectors(n, d, seed)).values;
      } else {
        if (m == 0) m = n;
        rep.params = {{"n", n}, {"m", m}, {"out", output}};
        out_matrix = random_half_integer(n, m, seed, 0);
      }
      write_csv_file(output, out_matrix);
      rep.results = {{"rows", out_matrix.rows()}, {"cols", out_matrix.cols()}, {"path", output}};
    } else if (cmd_verify1->parsed()) {
      rep.command = "verify-theorem1";
      if (corpus != "random") throw std::invalid_argument("unknown corpus '" + corpus + "'");
      const double tol = 1e-3;
      rep.params = {{"corpus", corpus}, {"count", count}, {"size", size}, {"cap", cap},
                    {"tolerance", tol}};
      json per_matrix = json::array();
      bool all_hold = true;
      for (int i = 0; i < count; ++i) {
        Matrix z = random_half_integer(size, size, seed, static_cast<std::uint64_t>(i));
        SandwichRow row = theorem1_sandwich(SimMatrix(z), cfg, cap, tol);
        all_hold &= row.holds;
        per_matrix.push_back({{"index", i},
                              {"matrix", matrix_to_json(z)},
                              {"max_norm", row.t},
                              {"centered_max_norm", row.t_centered},
                              {"rho_2", row.rho2},
                              {"rho_3", row.rho_mid},
                              {"rho_inf", row.rho_inf},
                              {"rho_2_centered", row.rho2_centered},
                              {"sandwich_holds", row.holds}});
      }
      rep.results = {{"per_matrix", std::move(per_matrix)},
                     {"all_hold", all_hold},
                     {"krivine_constant", krivine_constant()},
                     {"tolerance", tol}};
    }
  } catch (const CsvError& e) {
    std::cerr << "maxlsh: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TooLargeError& e) {
    std::cerr << "maxlsh: " << e.what() << "\n";
    rep.status = Status::too_large;
    return rep.emit();
  } catch (const SolverFailure& e) {
    std::cerr << "maxlsh: " << e.what() << "\n";
    rep.status = Status::solver_failure;
    return rep.emit();
  } catch (const std::invalid_argument& e) {
    std::cerr << "maxlsh: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "maxlsh: " << e.what() << "\n";
    return kExitSolverFailure;
  }
  return rep.emit();
}
