// swarmbo command line: run, replay, anticipate, export-viz, report.
#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "swarmbo/config.hpp"
#include "swarmbo/csv.hpp"
#include "swarmbo/exports.hpp"
#include "swarmbo/objective.hpp"
#include "swarmbo/orchestrator.hpp"
#include "swarmbo/seeding.hpp"

namespace fs = std::filesystem;
using namespace swarmbo;

namespace {

void log_line(const std::string &s) { std::cerr << s << std::endl; }

int cmd_run(const std::string &config_path, const nlohmann::json &overrides) {
  RunConfig cfg = config_path.empty() ? RunConfig{} : load_config_file(config_path);
  apply_config_json(cfg, overrides);
  cfg.validate();
  RunOptions opts;
  opts.log = log_line;
  const RunRecord rec = run_bo(cfg, opts);
  const auto &best = rec.trials[rec.incumbent()];
  std::printf("trials %zu, epochs %zu, best y %s (trial %zu)\n", rec.trials.size(),
              rec.epochs.size(), format_double(best.y).c_str(), best.index);
  std::printf("record %s\n", (fs::path(cfg.out_dir) / "record.jsonl").c_str());
  return 0;
}

int cmd_report(const std::string &record_path) {
  const RunRecord rec = read_record(record_path);
  if (rec.trials.empty()) {
    std::printf("empty record\n");
    return 1;
  }
  const auto &best = rec.trials[rec.incumbent()];
  std::printf("acq %s, trials %zu, epochs %zu\n",
              rec.config.value("acq", std::string("?")).c_str(), rec.trials.size(),
              rec.epochs.size());
  std::printf("incumbent trial %zu (epoch %zu): y %s  L_H %s  L_T %s\n", best.index,
              best.epoch, format_double(best.y).c_str(),
              format_double(best.loss_hairpin).c_str(),
              format_double(best.loss_tunnel).c_str());
  for (std::size_t i = 0; i < kNumParams; ++i)
    std::printf("  %-8s %s\n", std::string(ParamVector::kNames[i]).c_str(),
                format_double(best.params[i]).c_str());
  std::printf("\n%6s %14s %14s %14s\n", "epoch", "max_post_var", "dissimilarity",
              "best_observed");
  for (const auto &e : rec.epochs)
    std::printf("%6d %14.6g %14.6g %14.6g\n", e.metrics.epoch, e.metrics.max_post_var,
                e.metrics.dissimilarity, e.metrics.best_observed);
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Bayesian optimization of swarm controller parameters"};
  app.require_subcommand(1);

  // run
  auto *run = app.add_subcommand("run", "optimize parameters on both mazes");
  std::string config_path, acq, maze_dir, out;
  std::size_t epochs = 0, init = 0, batch = 0, mc = 0, agents = 0;
  std::uint64_t seed = 0;
  double cutoff = 0.0;
  run->add_option("--config", config_path, "TOML or JSON config file")->check(CLI::ExistingFile);
  run->add_option("--acq", acq, "qei, qnei or random")
      ->check(CLI::IsMember({"qei", "qnei", "random"}));
  run->add_option("--epochs", epochs);
  run->add_option("--init", init, "initial random evaluations");
  run->add_option("--batch", batch, "candidates per epoch");
  run->add_option("--mc", mc, "Monte-Carlo samples");
  run->add_option("--seed", seed);
  run->add_option("--maze-dir", maze_dir, "directory with hairpin.json and tunnel.json");
  run->add_option("--out", out, "output directory");
  run->add_option("--cutoff-s", cutoff, "simulated seconds per episode");
  run->add_option("--agents", agents, "swarm size");

  // replay
  auto *rep = app.add_subcommand("replay", "simulate one episode with trajectory logs");
  std::string params_file, from_record, maze_name = "hairpin", rep_maze_dir, rep_out = "replay";
  std::size_t trial = 0;
  std::uint64_t rep_seed = 0;
  std::size_t rep_agents = 0;
  bool use_default = false;
  auto *pf = rep->add_option("--params-file", params_file)->check(CLI::ExistingFile);
  auto *fr = rep->add_option("--from-record", from_record)->check(CLI::ExistingFile);
  auto *df = rep->add_flag("--default-params", use_default, "reference parameter set");
  pf->excludes(fr)->excludes(df);
  fr->excludes(df);
  rep->add_option("--trial", trial, "trial index in the record (default: incumbent)");
  rep->add_option("--maze", maze_name)->check(CLI::IsMember({"hairpin", "tunnel"}));
  rep->add_option("--maze-dir", rep_maze_dir);
  rep->add_option("--seed", rep_seed);
  rep->add_option("--agents", rep_agents);
  rep->add_option("--out", rep_out);

  // anticipate
  auto *ant = app.add_subcommand("anticipate", "acquisition-chosen samples scored by the posterior");
  std::string ant_record, ant_out = "anticipated.csv", ant_acq;
  std::size_t ant_n = 500, ant_raw = 64, ant_starts = 2, ant_mc = 128;
  ant->add_option("--record", ant_record)->required()->check(CLI::ExistingFile);
  ant->add_option("--n", ant_n);
  ant->add_option("--out", ant_out);
  ant->add_option("--acq", ant_acq)->check(CLI::IsMember({"qei", "qnei"}));
  ant->add_option("--raw", ant_raw, "raw candidates per acquisition");
  ant->add_option("--starts", ant_starts, "refined starts per acquisition");
  ant->add_option("--mc", ant_mc);

  // export-viz
  auto *exp = app.add_subcommand("export-viz", "write tables and replays for plotting");
  std::string exp_record, exp_out = "viz";
  bool no_replay = false;
  exp->add_option("--record", exp_record)->required()->check(CLI::ExistingFile);
  exp->add_option("--out", exp_out);
  exp->add_flag("--no-replay", no_replay);

  // report
  auto *rpt = app.add_subcommand("report", "print the incumbent and metrics");
  std::string rpt_record;
  rpt->add_option("--record", rpt_record)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      nlohmann::json o = nlohmann::json::object();
      if (*run->get_option("--acq")) o["acq"] = acq;
      if (*run->get_option("--epochs")) o["epochs"] = epochs;
      if (*run->get_option("--init")) o["init"] = init;
      if (*run->get_option("--batch")) o["batch"] = batch;
      if (*run->get_option("--mc")) o["mc"] = mc;
      if (*run->get_option("--seed")) o["seed"] = seed;
      if (*run->get_option("--maze-dir")) o["maze_dir"] = maze_dir;
      if (*run->get_option("--out")) o["out"] = out;
      if (*run->get_option("--cutoff-s")) o["cutoff_s"] = cutoff;
      if (*run->get_option("--agents")) o["agents"] = agents;
      return cmd_run(config_path, o);
    }
    if (*rep) {
      SwarmConstants consts;
      std::string dir = rep_maze_dir;
      ParamVector p = default_params();
      if (!params_file.empty()) {
        p = load_params(params_file);
      } else if (!from_record.empty()) {
        const RunRecord rec = read_record(from_record);
        const RunConfig cfg = config_from_json(rec.config);
        consts = cfg.consts;
        if (dir.empty())
          dir = cfg.maze_dir;
        const std::size_t idx = *rep->get_option("--trial") ? trial : rec.incumbent();
        if (idx >= rec.trials.size())
          throw std::runtime_error("trial " + std::to_string(idx) + " not in record");
        p = rec.trials[idx].params;
      } else if (!use_default) {
        throw std::runtime_error("one of --params-file, --from-record or --default-params is required");
      }
      if (*rep->get_option("--agents"))
        consts.n_agents = rep_agents;
      const auto mazes = load_mazes(dir);
      const MazeSpec &maze = maze_name == "hairpin" ? mazes.first : mazes.second;
      const ReplayOutput r = replay(p, maze, consts, rep_seed, rep_out);
      for (const auto &c : r.clamped)
        std::fprintf(stderr, "warning: %s clamped into bounds\n", c.c_str());
      const long n_t = r.result.n_steps;
      std::printf("captured %zu/%zu, completion %s s, loss %s\n", r.result.num_captured(),
                  maze.num_rewards(),
                  format_double(static_cast<double>(r.result.completion_step) * consts.dt).c_str(),
                  format_double(episode_loss(r.result, n_t, maze.num_rewards()).value).c_str());
      std::printf("wrote %s, %s\n", r.trajectory_path.c_str(), r.captures_path.c_str());
      return 0;
    }
    if (*ant) {
      const RunRecord rec = read_record(ant_record);
      const RunConfig cfg = config_from_json(rec.config);
      const GPModel model = fit_record(rec);
      AcqConfig a = cfg.acq_config(derive_seed(cfg.seed, {tag(SeedTag::Anticipate)}));
      if (!ant_acq.empty())
        a.kind = parse_acq_kind(ant_acq);
      a.n_raw = ant_raw;
      a.n_starts = ant_starts;
      a.n_mc = ant_mc;
      const auto rows = anticipate(model, rec.dataset(), a, ant_n);
      write_anticipated(rows, ant_out);
      std::printf("wrote %zu rows to %s\n", rows.size(), ant_out.c_str());
      return 0;
    }
    if (*exp) {
      const RunRecord rec = read_record(exp_record);
      ExportOptions eo;
      eo.replay_incumbent = !no_replay;
      export_viz(rec, fit_record(rec), exp_out, eo);
      std::printf("wrote exports to %s\n", exp_out.c_str());
      return 0;
    }
    if (*rpt)
      return cmd_report(rpt_record);
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
