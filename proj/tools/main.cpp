#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "ensform/json_io.hpp"
#include "ensform/rng.hpp"

namespace {

using namespace ensform;
namespace fs = std::filesystem;

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 42;
  int jobs = 1;
};

json load_config(const CommonOptions& opt) {
  std::ifstream in(opt.config_path);
  if (!in) throw ConfigError("cannot open config file: " + opt.config_path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("config parse error: ") + err.what());
  }
  return j;
}

void write_report(const CommonOptions& opt, const std::string& name, const json& report) {
  fs::create_directories(opt.out_dir);
  const fs::path path = fs::path(opt.out_dir) / name;
  std::ofstream out(path);
  out << report.dump(2) << "\n";
  std::cout << report.dump(2) << std::endl;
}

LieCaps caps_from_json(const json& cfg) {
  LieCaps caps;
  if (cfg.contains("caps")) {
    const json& c = cfg.at("caps");
    check_fields(c, "caps", {}, {"max_vertices", "max_depth", "max_set_size"});
    caps.max_vertices = c.value("max_vertices", caps.max_vertices);
    caps.max_depth = c.value("max_depth", caps.max_depth);
    caps.max_set_size = c.value("max_set_size", caps.max_set_size);
  }
  return caps;
}

json resolved_common(const CommonOptions& opt) {
  return {{"seed", opt.seed}, {"jobs", opt.jobs}};
}

// ---- lie verify -------------------------------------------------------------

int cmd_lie_verify(const CommonOptions& opt) {
  const json cfg = load_config(opt);
  check_fields(cfg, "lie verify config", {"graph"}, {"caps"});
  const Digraph g = graph_from_json(cfg.at("graph"));
  const LieCaps caps = caps_from_json(cfg);
  if (!g.is_strongly_connected())
    throw HypothesisError("lie verify: digraph is not strongly connected");
  if (g.n_vertices() < 3) throw HypothesisError("lie verify: requires N >= 3");

  const int n = g.n_vertices();
  const int d = g.diameter();
  const int gamma = commutator_ideal_dim(n);
  const MatrixSet star = s_star_g(g);
  const int rank = rank_span(star);

  const AdLevels lv = ad_levels(g, std::min(d + 2, caps.max_depth), caps);
  json containment = json::array();
  bool contained_all = true;
  json monotone = json::array();
  for (int m = d; m <= d + 2 && m < static_cast<int>(lv.levels.size()); ++m) {
    const ContainsReport rep = contains_set(lv.levels[m], star);
    contained_all = contained_all && rep.contained;
    json missing = json::array();
    for (const auto& mm : rep.missing) missing.push_back(int_matrix_to_json(mm));
    containment.push_back({{"depth", m},
                           {"set_size", lv.levels[m].size()},
                           {"contained", rep.contained},
                           {"missing", missing}});
    if (m + 1 < static_cast<int>(lv.levels.size()))
      monotone.push_back({{"depth", m},
                          {"subset_of_next", contains_set(lv.levels[m + 1], lv.levels[m]).contained}});
  }
  json level_sizes = json::array();
  for (std::size_t k = 0; k < lv.levels.size(); ++k)
    level_sizes.push_back({{"depth", k},
                           {"size", lv.levels[k].size()},
                           {"zero_products_dropped", lv.zero_products[k]}});

  const SemiCodistReport codist = verify_semi_codistinguished(g);
  const LeviReport levi = levi_check(n);

  const bool passed = rank == gamma && contained_all && codist.passed && levi.passed;
  json report = {{"command", "lie verify"},
                 {"config", {{"graph", graph_to_json(g)}, {"common", resolved_common(opt)}}},
                 {"n", n},
                 {"diameter", d},
                 {"spanning_set_size", star.size()},
                 {"rank", rank},
                 {"expected_rank", gamma},
                 {"ad_levels", level_sizes},
                 {"containment", containment},
                 {"ad_monotonicity_observed", monotone},
                 {"semi_codistinguished", semi_codist_report_to_json(codist)},
                 {"levi", levi_report_to_json(levi)},
                 {"passed", passed}};
  write_report(opt, "lie_verify_report.json", report);
  return passed ? 0 : 1;
}

// ---- lie ad -----------------------------------------------------------------

int cmd_lie_ad(const CommonOptions& opt) {
  const json cfg = load_config(opt);
  check_fields(cfg, "lie ad config", {"graph", "depth"}, {"caps"});
  const Digraph g = graph_from_json(cfg.at("graph"));
  const int depth = cfg.at("depth").get<int>();
  const AdLevels lv = ad_levels(g, depth, caps_from_json(cfg));
  json report = {{"command", "lie ad"},
                 {"config",
                  {{"graph", graph_to_json(g)}, {"depth", depth}, {"common", resolved_common(opt)}}},
                 {"depth", depth},
                 {"set_size", lv.levels.back().size()},
                 {"zero_products_dropped", lv.zero_products.back()},
                 {"elements", matrix_set_to_json(lv.levels.back())}};
  write_report(opt, "lie_ad_report.json", report);
  return 0;
}

// ---- lie basis --------------------------------------------------------------

int cmd_lie_basis(const CommonOptions& opt) {
  const json cfg = load_config(opt);
  check_fields(cfg, "lie basis config", {"graph"}, {"depth"});
  const Digraph g = graph_from_json(cfg.at("graph"));
  const int depth = cfg.contains("depth") ? cfg.at("depth").get<int>() : codist_min_depth(g);
  json words = json::array();
  for (const auto& [word, value] : codist_basis(g, depth))
    words.push_back({{"word", bracket_word_to_json(word)}, {"value", int_matrix_to_json(value)}});
  json report = {{"command", "lie basis"},
                 {"config",
                  {{"graph", graph_to_json(g)}, {"depth", depth}, {"common", resolved_common(opt)}}},
                 {"depth", depth},
                 {"count", words.size()},
                 {"basis", words}};
  write_report(opt, "lie_basis_report.json", report);
  return 0;
}

// ---- span check ---------------------------------------------------------------

int cmd_span_check(const CommonOptions& opt) {
  const json cfg = load_config(opt);
  check_fields(cfg, "span check config", {}, {"trials", "tol", "dims", "max_agents"});
  const int trials = cfg.value("trials", 100);
  const double tol = cfg.value("tol", kDefaultRankTol);
  const std::vector<int> dims = cfg.value("dims", std::vector<int>{2, 3});
  const int max_agents = cfg.value("max_agents", 6);

  bool passed = true;
  json cases = json::array();
  for (int n : dims) {
    // boundary case N = n+1: the ideal's image cannot fill the configuration space
    {
      DeterministicRng rng(opt.seed);
      int worst = 0;
      for (int t = 0; t < trials; ++t) {
        Configuration x = random_gaussian_config(rng, n + 1, n);
        SpanReport rep = span_rank(x, ideal_basis(n + 1), tol);
        worst = std::max(worst, rep.rank);
      }
      const bool ok = worst <= n * (n + 1) - 1;
      passed = passed && ok;
      cases.push_back({{"dim", n},
                       {"agents", n + 1},
                       {"kind", "boundary"},
                       {"max_rank_seen", worst},
                       {"rank_bound", n * (n + 1) - 1},
                       {"passed", ok}});
    }
    for (int agents = n + 2; agents <= max_agents; ++agents) {
      DeterministicRng rng(opt.seed);
      int full = 0, constructive_ok = 0;
      for (int t = 0; t < trials; ++t) {
        Configuration x = random_gaussian_config(rng, agents, n);
        SpanReport rep = span_rank(x, ideal_basis(agents), tol);
        if (rep.rank == agents * n) ++full;
        try {
          auto basis = constructive_basis(x, tol);
          if (static_cast<int>(basis.size()) == agents * n) ++constructive_ok;
        } catch (const std::exception&) {
        }
      }
      const bool ok = full == trials && constructive_ok == trials;
      passed = passed && ok;
      cases.push_back({{"dim", n},
                       {"agents", agents},
                       {"kind", "full-rank"},
                       {"trials", trials},
                       {"full_rank_count", full},
                       {"constructive_count", constructive_ok},
                       {"passed", ok}});
    }
  }
  json report = {{"command", "span check"},
                 {"config",
                  {{"trials", trials},
                   {"tol", tol},
                   {"dims", dims},
                   {"max_agents", max_agents},
                   {"common", resolved_common(opt)}}},
                 {"cases", cases},
                 {"passed", passed}};
  write_report(opt, "span_check_report.json", report);
  return passed ? 0 : 1;
}

// ---- shared experiment pieces -------------------------------------------------

GraphSchedule schedule_from_config(const json& cfg, double T) {
  if (cfg.contains("schedule") == cfg.contains("graph"))
    throw ConfigError("experiment: specify exactly one of graph or schedule");
  if (cfg.contains("schedule")) return schedule_from_json(cfg.at("schedule"));
  return GraphSchedule::constant(graph_from_json(cfg.at("graph")), T);
}

Configuration initial_configuration(const json& j, std::uint64_t seed) {
  check_fields(j, "initial", {"kind"},
               {"configuration", "dim", "point", "n_agents", "side", "offset"});
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "configuration") return configuration_from_json(j.at("configuration"));
  if (kind == "consensus") {
    const int dim = j.at("dim").get<int>();
    const int agents = j.at("n_agents").get<int>();
    Configuration x(agents, dim);
    for (int i = 0; i < agents; ++i)
      for (int k = 0; k < dim; ++k) x(i, k) = j.at("point").at(k).get<double>();
    return x;
  }
  if (kind == "square") {
    const double side = j.value("side", 1.0);
    Configuration x(4, 2);
    x << side / 2, side / 2, -side / 2, side / 2, -side / 2, -side / 2, side / 2, -side / 2;
    return x;
  }
  if (kind == "simplex")
    return simplex_base_configuration(j.at("n_agents").get<int>(), j.at("dim").get<int>());
  if (kind == "random") {
    DeterministicRng rng(seed);
    return random_gaussian_config(rng, j.at("n_agents").get<int>(), j.at("dim").get<int>());
  }
  throw ConfigError("initial: unknown kind '" + kind + "'");
}

EdgeControl edge_control_from_json(const json& j) {
  check_fields(j, "controls", {"kind"}, {"entries", "t0", "dt"});
  EdgeControl u;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "zero") return u;
  if (kind == "constant") {
    for (const auto& e : j.at("entries")) {
      check_fields(e, "control entry", {"edge", "s", "value"});
      u.set(e.at("edge").at(0).get<int>(), e.at("edge").at(1).get<int>(), e.at("s").get<int>() - 1,
            TimeSeries::constant(e.at("value").get<double>()));
    }
    return u;
  }
  if (kind == "sampled") {
    const double t0 = j.value("t0", 0.0);
    const double dt = j.at("dt").get<double>();
    for (const auto& e : j.at("entries")) {
      check_fields(e, "control entry", {"edge", "s", "values"});
      u.set(e.at("edge").at(0).get<int>(), e.at("edge").at(1).get<int>(), e.at("s").get<int>() - 1,
            TimeSeries(t0, dt, e.at("values").get<std::vector<double>>()));
    }
    return u;
  }
  throw ConfigError("controls: unknown kind '" + kind + "'");
}

void write_trajectory_csv(const fs::path& path, const Trajectory& traj) {
  std::ofstream out(path);
  out << "t,sigma_index,agent,coordinate,value\n";
  out.precision(17);
  for (std::size_t q = 0; q < traj.times.size(); ++q)
    for (std::size_t m = 0; m < traj.grid.size(); ++m) {
      const Configuration& x = traj.states[q][m];
      for (int a = 0; a < x.rows(); ++a)
        for (int k = 0; k < x.cols(); ++k)
          out << traj.times[q] << "," << m + 1 << "," << a + 1 << "," << k + 1 << ","
              << x(a, k) << "\n";
    }
}

// ---- sim run ------------------------------------------------------------------

int cmd_sim_run(const CommonOptions& opt) {
  const json cfg = load_config(opt);
  check_fields(cfg, "sim config", {"grid", "parameterization", "initial", "controls", "dt", "T"},
               {"graph", "schedule", "checks"});
  const double T = cfg.at("T").get<double>();
  const double dt = cfg.at("dt").get<double>();
  const GraphSchedule schedule = schedule_from_config(cfg, T);
  const SigmaGrid grid = grid_from_json(cfg.at("grid"));
  const ParameterizationSet p = parameterization_from_json(cfg.at("parameterization"));
  const EdgeControl u = edge_control_from_json(cfg.at("controls"));
  EnsembleState init;
  init.grid = grid;
  init.configs.assign(grid.size(), initial_configuration(cfg.at("initial"), opt.seed));

  const Trajectory traj = integrate_original(init, schedule, p, u, dt, T, opt.jobs);
  fs::create_directories(opt.out_dir);
  write_trajectory_csv(fs::path(opt.out_dir) / "trajectory.csv", traj);

  json checks_cfg = cfg.value("checks", json::object());
  check_fields(checks_cfg, "checks", {},
               {"consensus", "translation", "linearity", "exponential_oracle"});
  json checks = json::object();
  bool passed = true;
  const int agents = static_cast<int>(init.configs.front().rows());
  const int dim = static_cast<int>(init.configs.front().cols());

  if (checks_cfg.value("consensus", true)) {
    EnsembleState cons = init;
    Configuration flat(agents, dim);
    for (int i = 0; i < agents; ++i)
      for (int k = 0; k < dim; ++k) flat(i, k) = 0.4 - 0.3 * k;
    cons.configs.assign(grid.size(), flat);
    const Trajectory ct = integrate_original(cons, schedule, p, u, dt, T, opt.jobs);
    double drift = 0;
    for (const auto& states : ct.states)
      for (std::size_t m = 0; m < states.size(); ++m) drift = std::max(drift, (states[m] - flat).norm());
    const bool ok = drift < 1e-12;
    passed = passed && ok;
    checks["consensus"] = {{"drift", drift}, {"passed", ok}};
  }
  if (checks_cfg.value("translation", true)) {
    EnsembleState shifted = init;
    Eigen::RowVectorXd c(dim);
    for (int k = 0; k < dim; ++k) c(k) = 0.7 + 0.1 * k;
    for (auto& x : shifted.configs) x.rowwise() += c;
    const Trajectory t2 = integrate_original(shifted, schedule, p, u, dt, T, opt.jobs);
    double dev = 0;
    for (std::size_t q = 0; q < traj.times.size(); ++q)
      for (std::size_t m = 0; m < grid.size(); ++m) {
        Configuration expect = traj.states[q][m];
        expect.rowwise() += c;
        dev = std::max(dev, (t2.states[q][m] - expect).norm());
      }
    const bool ok = dev < 1e-10;
    passed = passed && ok;
    checks["translation"] = {{"deviation", dev}, {"passed", ok}};
  }
  if (checks_cfg.value("linearity", true)) {
    EnsembleState doubled = init;
    for (auto& x : doubled.configs) x *= 2.0;
    const Trajectory t2 = integrate_original(doubled, schedule, p, u, dt, T, opt.jobs);
    double dev = 0;
    for (std::size_t q = 0; q < traj.times.size(); ++q)
      for (std::size_t m = 0; m < grid.size(); ++m)
        dev = std::max(dev, (t2.states[q][m] - 2.0 * traj.states[q][m]).norm());
    const bool ok = dev < 1e-10;
    passed = passed && ok;
    checks["linearity"] = {{"deviation", dev}, {"passed", ok}};
  }
  const bool controls_constant = [&] {
    for (const auto& [key, series] : u.entries())
      for (double v : series.values())
        if (v != series.values().front()) return false;
    return true;
  }();
  if (checks_cfg.value("exponential_oracle", controls_constant && schedule.segments().size() == 1)) {
    if (!controls_constant || schedule.segments().size() != 1)
      throw ConfigError("checks: exponential oracle needs constant controls and a static graph");
    double dev = 0;
    for (std::size_t m = 0; m < grid.size(); ++m) {
      Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(agents, agents);
      for (auto [i, j] : schedule.segments().front().second.edges())
        for (int s = 0; s < p.size(); ++s) {
          const double c = u.eval(i, j, s, 0.0) * p.eval(s, grid.samples[m]);
          if (c != 0.0) gen += c * to_dense(primary_matrix(agents, i, j));
        }
      const Configuration ref = matrix_exponential_series(T * gen) * init.configs[m];
      dev = std::max(dev, (traj.states.back()[m] - ref).norm());
    }
    const bool ok = dev < 1e-8;
    passed = passed && ok;
    checks["exponential_oracle"] = {{"deviation", dev}, {"passed", ok}};
  }

  json switch_times = json::array();
  for (std::size_t k = 1; k < schedule.segments().size(); ++k)
    switch_times.push_back(schedule.segments()[k].first);
  json report = {{"command", "sim run"},
                 {"config",
                  {{"schedule", schedule_to_json(schedule)},
                   {"grid", grid_to_json(grid)},
                   {"parameterization", parameterization_to_json(p)},
                   {"dt", dt},
                   {"T", T},
                   {"common", resolved_common(opt)}}},
                 {"switch_times", switch_times},
                 {"steps", traj.times.size() - 1},
                 {"checks", checks},
                 {"passed", passed}};
  write_report(opt, "sim_report.json", report);
  return passed ? 0 : 1;
}

// ---- track run ------------------------------------------------------------------

TargetTrajectory target_from_json(const json& j, double T) {
  check_fields(j, "target", {"name"},
               {"side", "omega0", "omega1", "rate0", "rate1", "n_agents", "dim", "vel0", "vel1",
                "direction"});
  const std::string name = j.at("name").get<std::string>();
  if (name == "rotating-scaling-square") {
    RotatingSquareParams prm;
    prm.side = j.value("side", prm.side);
    prm.omega0 = j.value("omega0", prm.omega0);
    prm.omega1 = j.value("omega1", prm.omega1);
    prm.rate0 = j.value("rate0", prm.rate0);
    prm.rate1 = j.value("rate1", prm.rate1);
    return rotating_scaling_square(prm, T);
  }
  if (name == "translating-simplex") {
    TranslatingSimplexParams prm;
    prm.vel0 = j.value("vel0", prm.vel0);
    prm.vel1 = j.value("vel1", prm.vel1);
    if (j.contains("direction")) {
      prm.direction.resize(j.at("direction").size());
      for (std::size_t k = 0; k < j.at("direction").size(); ++k)
        prm.direction(static_cast<int>(k)) = j.at("direction").at(k).get<double>();
    }
    return translating_simplex(j.at("n_agents").get<int>(), j.at("dim").get<int>(), prm, T);
  }
  throw ConfigError("target: unknown name '" + name + "'");
}

int cmd_track_run(const CommonOptions& opt) {
  const json cfg = load_config(opt);
  check_fields(cfg, "track config",
               {"grid", "parameterization", "target", "degree_cap", "dt", "T", "epsilon"},
               {"graph", "schedule", "initial_offset", "blend_time", "feedback", "solve_tol"});
  const double T = cfg.at("T").get<double>();
  const GraphSchedule schedule = schedule_from_config(cfg, T);
  const SigmaGrid grid = grid_from_json(cfg.at("grid"));
  const ParameterizationSet p = parameterization_from_json(cfg.at("parameterization"));
  const TargetTrajectory target = target_from_json(cfg.at("target"), T);
  const double epsilon = cfg.at("epsilon").get<double>();

  TrackConfig tc;
  tc.degree_cap = cfg.at("degree_cap").get<int>();
  tc.dt = cfg.at("dt").get<double>();
  tc.horizon = T;
  tc.blend_time = cfg.value("blend_time", tc.blend_time);
  tc.feedback = cfg.value("feedback", false);
  tc.solve_tol = cfg.value("solve_tol", tc.solve_tol);
  tc.jobs = opt.jobs;

  EnsembleState init;
  init.grid = grid;
  for (const auto& s : grid.samples) init.configs.push_back(target.eval(0.0, s));
  if (cfg.contains("initial_offset")) {
    const auto& off = cfg.at("initial_offset");
    for (auto& x : init.configs)
      for (int i = 0; i < x.rows(); ++i)
        for (int k = 0; k < x.cols(); ++k) x(i, k) += off.at(i).at(k).get<double>();
  }

  auto [traj, rep] = track(target, schedule, p, grid, init, tc);
  fs::create_directories(opt.out_dir);
  write_trajectory_csv(fs::path(opt.out_dir) / "trajectory.csv", traj);

  const bool passed = rep.sup_error <= epsilon;
  json report = {{"command", "track run"},
                 {"config",
                  {{"schedule", schedule_to_json(schedule)},
                   {"grid", grid_to_json(grid)},
                   {"parameterization", parameterization_to_json(p)},
                   {"target", cfg.at("target")},
                   {"degree_cap", tc.degree_cap},
                   {"dt", tc.dt},
                   {"T", T},
                   {"epsilon", epsilon},
                   {"blend_time", tc.blend_time},
                   {"feedback", tc.feedback},
                   {"common", resolved_common(opt)}}},
                 {"report", tracking_report_to_json(rep)},
                 {"passed", passed}};
  write_report(opt, "track_report.json", report);
  return passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification and simulation toolkit for ensembles of formation systems"};
  app.require_subcommand(1);

  CommonOptions opt;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config_path, "experiment configuration (JSON)")->required();
    cmd->add_option("--seed", opt.seed, "random seed");
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--jobs", opt.jobs, "worker threads");
  };

  CLI::App* lie = app.add_subcommand("lie", "exact commutator computations");
  lie->require_subcommand(1);
  CLI::App* lie_verify = lie->add_subcommand("verify", "structural checks for a digraph");
  CLI::App* lie_ad = lie->add_subcommand("ad", "emit an iterated-commutator set");
  CLI::App* lie_basis = lie->add_subcommand("basis", "uniform-depth bracket-word basis");
  add_common(lie_verify);
  add_common(lie_ad);
  add_common(lie_basis);

  CLI::App* span = app.add_subcommand("span", "configuration-space span checks");
  CLI::App* span_check = span->add_subcommand("check", "randomized and constructive span suite");
  span->require_subcommand(1);
  add_common(span_check);

  CLI::App* sim = app.add_subcommand("sim", "simulate the formation dynamics");
  CLI::App* sim_run = sim->add_subcommand("run", "integrate an experiment config");
  sim->require_subcommand(1);
  add_common(sim_run);

  CLI::App* track_cmd = app.add_subcommand("track", "trajectory-tracking synthesis");
  CLI::App* track_run = track_cmd->add_subcommand("run", "synthesize and simulate tracking");
  track_cmd->require_subcommand(1);
  add_common(track_run);

  CLI11_PARSE(app, argc, argv);

  try {
    if (lie_verify->parsed()) return cmd_lie_verify(opt);
    if (lie_ad->parsed()) return cmd_lie_ad(opt);
    if (lie_basis->parsed()) return cmd_lie_basis(opt);
    if (span_check->parsed()) return cmd_span_check(opt);
    if (sim_run->parsed()) return cmd_sim_run(opt);
    if (track_run->parsed()) return cmd_track_run(opt);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 64;
  } catch (const HypothesisError& err) {
    std::cerr << "hypothesis failure: " << err.what() << "\n";
    return 2;
  } catch (const ResourceCapError& err) {
    std::cerr << "resource cap: " << err.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 64;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 64;
}
