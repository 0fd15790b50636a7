// Copyright 2026 The Pairlab Authors
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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <system_error>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pairlab/convergence.hpp"
#include "pairlab/io.hpp"
#include "pairlab/multi_align.hpp"
#include "pairlab/objectives.hpp"
#include "pairlab/rng.hpp"
#include "pairlab/toy_games.hpp"
#include "pairlab/verify.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pairlab;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitVerifyFailed = 3;

struct CommonOpts {
  std::uint64_t seed = 0;
  std::string out = "out";
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("--seed", opts->seed, "master seed");
  cmd->add_option("--out", opts->out, "output directory");
  cmd->add_option("--format", opts->format, "trajectory format")
      ->check(CLI::IsMember({"csv", "json"}));
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

fs::path prepare_out_dir(const std::string& out) {
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::system_error(ec, "cannot create output directory " + out);
  }
  return dir;
}

void write_trajectory(const GameTrajectory& traj, const fs::path& dir,
                      const std::string& stem, const std::string& format) {
  if (format == "csv") {
    write_trajectory_csv(traj, dir / (stem + ".csv"));
  } else {
    write_json_file(trajectory_to_json(traj), dir / (stem + ".json"));
  }
}

json field_to_json(const std::vector<VectorFieldSample>& field) {
  json nodes = json::array();
  for (const auto& s : field) {
    nodes.push_back({{"x_fake", s.x}, {"psi", s.psi}, {"dx", s.dx},
                     {"dpsi", s.dpsi}});
  }
  return {{"nodes", nodes}};
}

int run_dirac_cmd(const CommonOpts& common, const std::string& game_name,
                  double gamma, double x0, double psi0, int steps,
                  double lr_gen, double lr_disc, bool gen_first,
                  bool emit_field, int grid_res, double grid_lo,
                  double grid_hi) {
  Timer timer;
  const DiracGame game =
      game_name == "sgan" ? DiracGame::kSgan : DiracGame::kPairgan;
  DiracPairConfig cfg;
  cfg.gamma = gamma;
  cfg.lr_gen = lr_gen;
  cfg.lr_disc = lr_disc;
  cfg.steps = steps;
  cfg.order = gen_first ? UpdateOrder::kGeneratorFirst
                        : UpdateOrder::kDiscriminatorFirst;
  cfg.validate();

  const fs::path dir = prepare_out_dir(common.out);
  GameTrajectory traj = run_dirac(game, {x0, psi0}, cfg);
  traj.metadata["seed"] = std::to_string(common.seed);
  traj.metadata["game"] = game_name;
  write_trajectory(traj, dir, "dirac_" + game_name + "_trajectory",
                   common.format);

  if (emit_field) {
    if (!(grid_lo < grid_hi)) {
      throw CLI::ValidationError("--grid-lo/--grid-hi",
                                 "bounds must be increasing");
    }
    FieldGrid grid;
    grid.resolution = grid_res;
    grid.x_min = grid.psi_min = grid_lo;
    grid.x_max = grid.psi_max = grid_hi;
    write_json_file(field_to_json(dirac_vector_field(grid, game, cfg)),
                    dir / ("dirac_" + game_name + "_field.json"));
  }

  RunManifest manifest;
  manifest.config = {{"command", "dirac"},   {"game", game_name},
                     {"gamma", gamma},       {"x0", x0},
                     {"psi0", psi0},         {"steps", steps},
                     {"lr_gen", lr_gen},     {"lr_disc", lr_disc},
                     {"gen_first", gen_first},
                     {"seed", common.seed},  {"format", common.format},
                     {"field", emit_field},  {"grid_res", grid_res}};
  manifest.checks = {{"trajectory_complete",
                      traj.rows.size() == static_cast<std::size_t>(steps) + 1}};
  manifest.wall_seconds = timer.seconds();
  write_manifest(manifest, dir / "manifest.json");
  return kExitOk;
}

int run_pairgan_z_cmd(const CommonOpts& common, int k, double alpha,
                      double beta, int steps, const std::string& a0_kind,
                      const std::string& q0_kind, bool disc_first) {
  Timer timer;
  if (k < 2) {
    throw CLI::ValidationError("--k", "k must be >= 2");
  }
  const FiniteSpace space(k);
  Rng rng(derive_seed(common.seed, 0));
  const DensityVector p = random_density(rng, space, 0.05);
  const DensityVector q0 =
      q0_kind == "target" ? p : random_density(rng, space, 0.05);

  Matrix a0_entries;
  if (a0_kind == "identity") {
    a0_entries = Matrix::Identity(k, k);
  } else if (a0_kind == "neg-identity") {
    a0_entries = -Matrix::Identity(k, k);
  } else {
    a0_entries = random_symmetric_operator(rng, space).entries();
  }
  const PairwiseOperator a0(space, a0_entries);

  PairganZOptions opts;
  opts.alpha = alpha;
  opts.beta = beta;
  opts.steps = steps;
  opts.order = disc_first ? UpdateOrder::kDiscriminatorFirst
                          : UpdateOrder::kGeneratorFirst;

  const fs::path dir = prepare_out_dir(common.out);
  PairganZRun run = pairgan_z_iterate(p, q0, a0, opts);
  run.trajectory.metadata["seed"] = std::to_string(common.seed);
  write_trajectory(run.trajectory, dir, "pairgan_z_trajectory", common.format);

  RunManifest manifest;
  manifest.config = {{"command", "pairgan-z"}, {"k", k},
                     {"alpha", alpha},         {"beta", beta},
                     {"steps", steps},         {"a0", a0_kind},
                     {"q0", q0_kind},          {"seed", common.seed},
                     {"format", common.format}};
  manifest.config["first_pd_step"] =
      run.first_pd_step >= 0 ? json(run.first_pd_step) : json("never");
  manifest.checks = {
      {"trajectory_complete",
       run.trajectory.rows.size() == static_cast<std::size_t>(steps) + 1}};
  manifest.wall_seconds = timer.seconds();
  write_manifest(manifest, dir / "manifest.json");
  return kExitOk;
}

int run_multi_cmd(const CommonOpts& common, const std::string& variant,
                  double x1, double x2, double x3, double gamma, double lr,
                  int steps) {
  Timer timer;
  const fs::path dir = prepare_out_dir(common.out);

  MultiDeltaState s0;
  s0.points = {x1, x2, x3};
  Rng rng(derive_seed(common.seed, 0));
  for (auto& v : s0.unary_params) v = 0.1 * rng.gaussian();
  s0.pair_psi = 0.1 * rng.gaussian();

  GameTrajectory traj = variant == "unary"
                            ? run_multi_unary(s0, lr, steps)
                            : run_multi_pairwise(s0, gamma, lr, steps);
  traj.metadata["seed"] = std::to_string(common.seed);
  traj.metadata["variant"] = variant;
  write_trajectory(traj, dir, "multi_" + variant + "_trajectory",
                   common.format);

  RunManifest manifest;
  manifest.config = {{"command", "multi"}, {"variant", variant},
                     {"x1", x1},           {"x2", x2},
                     {"x3", x3},           {"gamma", gamma},
                     {"lr", lr},           {"steps", steps},
                     {"seed", common.seed}, {"format", common.format}};
  manifest.checks = {{"trajectory_complete",
                      traj.rows.size() == static_cast<std::size_t>(steps) + 1}};
  manifest.wall_seconds = timer.seconds();
  write_manifest(manifest, dir / "manifest.json");
  return kExitOk;
}

int run_sufficiency_cmd(const CommonOpts& common,
                        const std::string& generator_kind, int k,
                        const std::string& operator_kind,
                        double theta_scale) {
  Timer timer;
  if (k < 2) {
    throw CLI::ValidationError("--k", "k must be >= 2");
  }
  const FiniteSpace space(k);
  Rng rng(derive_seed(common.seed, 0));

  std::unique_ptr<ParametricGenerator> gen;
  Vector theta;
  if (generator_kind == "softmax") {
    gen = std::make_unique<SoftmaxGenerator>(space);
    theta = Vector(k);
    for (int i = 0; i < k; ++i) theta[i] = theta_scale * rng.gaussian();
  } else {
    gen = std::make_unique<FreeSimplexGenerator>(space);
    theta = random_density(rng, space, 0.2).values().head(k - 1);
  }

  PairwiseOperator op = [&]() -> PairwiseOperator {
    if (operator_kind == "rbf") {
      std::vector<double> positions(k);
      for (int i = 0; i < k; ++i) positions[i] = static_cast<double>(i);
      return rbf_kernel_operator(space, positions);
    }
    if (operator_kind == "identity") {
      return PairwiseOperator(space, Matrix::Identity(k, k));
    }
    if (operator_kind == "zero") {
      return PairwiseOperator(space, Matrix::Zero(k, k));
    }
    if (operator_kind == "astar1") {
      return minimally_sufficient_operators(*gen, theta).first;
    }
    if (operator_kind == "astar2") {
      return minimally_sufficient_operators(*gen, theta).second;
    }
    return random_symmetric_operator(rng, space);
  }();

  const SufficiencyReport report = check_sufficient(*gen, theta, op);

  json spectrum = json::array();
  for (int i = 0; i < report.restricted_spectrum.size(); ++i) {
    spectrum.push_back(report.restricted_spectrum[i]);
  }
  const json report_json = {
      {"generator", generator_kind},
      {"operator", operator_kind},
      {"k", k},
      {"restricted_spectrum", spectrum},
      {"min_margin", report.min_margin},
      {"pd_tolerance", report.pd_tolerance},
      {"operator_rank", report.operator_rank},
      {"tangent_dim", report.tangent_dim},
      {"verdict", report.sufficient() ? "sufficient" : "insufficient"}};

  const fs::path dir = prepare_out_dir(common.out);
  write_json_file(report_json, dir / "sufficiency_report.json");

  RunManifest manifest;
  manifest.config = {{"command", "sufficiency"},
                     {"generator", generator_kind},
                     {"operator", operator_kind},
                     {"k", k},
                     {"theta_scale", theta_scale},
                     {"seed", common.seed}};
  manifest.checks = {{"report_written", true}};
  manifest.wall_seconds = timer.seconds();
  write_manifest(manifest, dir / "manifest.json");
  return kExitOk;
}

int run_verify_cmd(const CommonOpts& common, const std::string& sizes,
                   std::vector<std::uint64_t> seeds,
                   const std::vector<double>& eps_ladder,
                   const std::string& poison, int threads) {
  Timer timer;
  VerifyConfig config;
  if (!seeds.empty()) {
    config.seeds = std::move(seeds);
  } else if (common.seed != 0) {
    config.seeds = {common.seed};
  }
  if (!eps_ladder.empty()) {
    for (const double eps : eps_ladder) {
      if (!(eps > 0.0 && eps < 1.0)) {
        throw CLI::ValidationError("--eps", "floors must lie in (0, 1)");
      }
    }
    config.eps_ladder = eps_ladder;
  }
  config.poison = poison;
  config.threads = threads;

  const auto sep = sizes.find("..");
  if (sep == std::string::npos) {
    throw CLI::ValidationError("--sizes", "expected <min>..<max>");
  }
  config.k_min = std::stoi(sizes.substr(0, sep));
  config.k_max = std::stoi(sizes.substr(sep + 2));
  if (config.k_min < 2 || config.k_max < config.k_min) {
    throw CLI::ValidationError("--sizes", "need 2 <= min <= max");
  }

  const std::vector<CheckResult> results = run_verification(config);

  json checks = json::array();
  for (const auto& r : results) {
    checks.push_back({{"name", r.name},
                      {"pass", r.pass},
                      {"measured_error", r.measured},
                      {"tolerance", r.tolerance},
                      {"detail", r.detail},
                      {"seconds", r.seconds}});
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name
              << "  measured=" << r.measured << " tol=" << r.tolerance
              << "\n";
  }

  json seeds_json = json::array();
  for (const auto s : config.seeds) seeds_json.push_back(s);
  const json report = {{"artifact_version", kArtifactVersion},
                       {"seeds", seeds_json},
                       {"k_min", config.k_min},
                       {"k_max", config.k_max},
                       {"eps_ladder", config.eps_ladder},
                       {"poison", config.poison},
                       {"checks", checks},
                       {"all_passed", all_passed(results)}};

  const fs::path dir = prepare_out_dir(common.out);
  write_json_file(report, dir / "verify_report.json");

  RunManifest manifest;
  manifest.config = {{"command", "verify"},
                     {"sizes", sizes},
                     {"seeds", seeds_json},
                     {"poison", poison},
                     {"threads", threads}};
  for (const auto& r : results) {
    manifest.checks.emplace_back(r.name, r.pass);
  }
  manifest.wall_seconds = timer.seconds();
  write_manifest(manifest, dir / "manifest.json");

  return all_passed(results) ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pairlab: pairwise-discriminator adversarial training lab"};
  app.require_subcommand(1);

  // dirac
  CommonOpts dirac_common;
  std::string dirac_game = "pairgan";
  double gamma = 2.0, x0 = 1.5, psi0 = 0.5, lr_gen = 0.1, lr_disc = 0.1;
  int dirac_steps = 2000, grid_res = 41;
  double grid_lo = -2.0, grid_hi = 2.0;
  bool emit_field = false, dirac_gen_first = false;
  CLI::App* dirac = app.add_subcommand("dirac", "DiracGAN-style toy games");
  add_common(dirac, &dirac_common);
  dirac->add_option("--game", dirac_game)->check(CLI::IsMember({"sgan", "pairgan"}));
  dirac->add_option("--gamma", gamma);
  dirac->add_option("--x0", x0);
  dirac->add_option("--psi0", psi0);
  dirac->add_option("--steps", dirac_steps);
  dirac->add_option("--lr-gen", lr_gen);
  dirac->add_option("--lr-disc", lr_disc);
  dirac->add_flag("--gen-first", dirac_gen_first,
                  "update the generator before the discriminator");
  dirac->add_flag("--field", emit_field, "also write the vector-field grid");
  dirac->add_option("--grid-res", grid_res);
  dirac->add_option("--grid-lo", grid_lo, "field bound, both axes");
  dirac->add_option("--grid-hi", grid_hi, "field bound, both axes");

  // pairgan-z
  CommonOpts pz_common;
  int pz_k = 5, pz_steps = 200;
  double alpha = 0.1, beta = 0.1;
  std::string a0_kind = "identity", q0_kind = "random";
  bool pz_disc_first = false;
  CLI::App* pz = app.add_subcommand("pairgan-z",
                                    "zero-sum simplex game iteration");
  add_common(pz, &pz_common);
  pz->add_option("--k", pz_k);
  pz->add_option("--alpha", alpha);
  pz->add_option("--beta", beta);
  pz->add_option("--steps", pz_steps);
  pz->add_option("--a0", a0_kind)
      ->check(CLI::IsMember({"identity", "neg-identity", "random"}));
  pz->add_option("--q0", q0_kind)->check(CLI::IsMember({"random", "target"}));
  pz->add_flag("--disc-first", pz_disc_first,
               "update the operator before the generator");

  // multi
  CommonOpts multi_common;
  std::string variant = "pairwise";
  double x1 = -1.0, x2 = 0.2, x3 = 1.3, multi_gamma = 2.0, multi_lr = 0.1;
  int multi_steps = 2000;
  CLI::App* multi = app.add_subcommand("multi",
                                       "three-delta alignment toy games");
  add_common(multi, &multi_common);
  multi->add_option("--variant", variant)
      ->check(CLI::IsMember({"unary", "pairwise"}));
  multi->add_option("--x1", x1);
  multi->add_option("--x2", x2);
  multi->add_option("--x3", x3);
  multi->add_option("--gamma", multi_gamma);
  multi->add_option("--lr", multi_lr);
  multi->add_option("--steps", multi_steps);

  // sufficiency
  CommonOpts suff_common;
  std::string generator_kind = "softmax", operator_kind = "rbf";
  int suff_k = 4;
  double theta_scale = 0.3;
  CLI::App* suff = app.add_subcommand(
      "sufficiency", "sufficiency report for a generator/operator pair");
  add_common(suff, &suff_common);
  suff->add_option("--generator", generator_kind)
      ->check(CLI::IsMember({"softmax", "free-simplex"}));
  suff->add_option("--operator", operator_kind)
      ->check(CLI::IsMember(
          {"rbf", "identity", "zero", "astar1", "astar2", "random"}));
  suff->add_option("--k", suff_k);
  suff->add_option("--theta-scale", theta_scale);

  // verify
  CommonOpts verify_common;
  std::string sizes = "2..8", poison;
  std::vector<std::uint64_t> verify_seeds;
  std::vector<double> verify_eps;
  int threads = 4;
  CLI::App* verify = app.add_subcommand("verify",
                                        "run the full property suite");
  add_common(verify, &verify_common);
  verify->add_option("--sizes", sizes, "object-set size range, e.g. 2..8");
  verify->add_option("--seeds", verify_seeds, "explicit seed list");
  verify->add_option("--eps", verify_eps,
                     "discriminator floors for the zero-sum identity");
  verify->add_option("--poison", poison, "fault-injection hook")
      ->check(CLI::IsMember({"hessian"}));
  verify->add_option("--threads", threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (dirac->parsed()) {
      return run_dirac_cmd(dirac_common, dirac_game, gamma, x0, psi0,
                           dirac_steps, lr_gen, lr_disc, dirac_gen_first,
                           emit_field, grid_res, grid_lo, grid_hi);
    }
    if (pz->parsed()) {
      return run_pairgan_z_cmd(pz_common, pz_k, alpha, beta, pz_steps,
                               a0_kind, q0_kind, pz_disc_first);
    }
    if (multi->parsed()) {
      return run_multi_cmd(multi_common, variant, x1, x2, x3, multi_gamma,
                           multi_lr, multi_steps);
    }
    if (suff->parsed()) {
      return run_sufficiency_cmd(suff_common, generator_kind, suff_k,
                                 operator_kind, theta_scale);
    }
    if (verify->parsed()) {
      return run_verify_cmd(verify_common, sizes, verify_seeds, verify_eps,
                            poison, threads);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::system_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitConfig;
}
