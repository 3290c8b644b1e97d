#include "swarmbo/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <future>
#include <memory>
#include <random>
#include <stdexcept>

#include "swarmbo/objective.hpp"
#include "swarmbo/seeding.hpp"

namespace swarmbo {
namespace fs = std::filesystem;

namespace {

  void say(const RunOptions &opts, const std::string &msg) {
    if (opts.log)
      opts.log(msg);
  }

  TrialEntry evaluate_trial(const BlackBox &objective, const ParamVector &p,
                            std::size_t index, std::size_t epoch,
                            std::uint64_t master) {
    TrialEntry t;
    t.index = index;
    t.epoch = epoch;
    t.params = p;
    t.seed = trial_seed(master, index);
    const auto start = std::chrono::steady_clock::now();
    const TrialOutcome o = objective(p, t.seed);
    t.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                start)
                      .count();
    t.loss_hairpin = o.loss_hairpin;
    t.loss_tunnel = o.loss_tunnel;
    t.y = o.y;
    return t;
  }

  std::vector<TrialEntry> evaluate_batch(const BlackBox &objective,
                                         const std::vector<ParamVector> &points,
                                         std::size_t first_index,
                                         std::size_t epoch, std::uint64_t master,
                                         bool parallel) {
    std::vector<TrialEntry> out;
    if (!parallel || points.size() < 2) {
      for (std::size_t i = 0; i < points.size(); ++i)
        out.push_back(evaluate_trial(objective, points[i], first_index + i,
                                     epoch, master));
      return out;
    }
    std::vector<std::future<TrialEntry>> jobs;
    for (std::size_t i = 0; i < points.size(); ++i)
      jobs.push_back(std::async(std::launch::async, evaluate_trial,
                                std::cref(objective), std::cref(points[i]),
                                first_index + i, epoch, master));
    for (auto &j : jobs)
      out.push_back(j.get());
    return out;
  }

  FitOptions fit_options(const RunConfig &cfg, const RunRecord &record) {
    FitOptions f;
    f.restarts = cfg.fit_restarts;
    f.max_iterations = cfg.fit_iterations;
    if (!record.epochs.empty())
      f.warm_start = record.epochs.back().hyper;
    return f;
  }

}  // namespace

std::pair<MazeSpec, MazeSpec> load_mazes(const std::string &dir) {
  if (dir.empty())
    return builtin_mazes();
  return {load_maze((fs::path(dir) / "hairpin.json").string()),
          load_maze((fs::path(dir) / "tunnel.json").string())};
}

BlackBox swarm_black_box(const SwarmConstants &consts,
                         std::pair<MazeSpec, MazeSpec> mazes, double cutoff_s,
                         bool parallel) {
  return [consts, mazes = std::move(mazes), cutoff_s,
          parallel](const ParamVector &p, std::uint64_t seed) {
    const Evaluation e = evaluate_params(p, consts, mazes, seed, cutoff_s, parallel);
    return TrialOutcome{e.hairpin.value, e.tunnel.value, e.combined.value};
  };
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t index) {
  return derive_seed(master, {tag(SeedTag::Trial), index});
}

std::vector<ParamVector> initial_design(const RunConfig &cfg) {
  std::mt19937_64 rng(derive_seed(cfg.seed, {tag(SeedTag::InitialDesign)}));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<ParamVector> out;
  for (std::size_t i = 0; i < cfg.n_init; ++i) {
    ParamArray u;
    for (Eigen::Index d = 0; d < u.size(); ++d)
      u[d] = unif(rng);
    out.push_back(ParamVector::from_unit(u));
  }
  return out;
}

RunRecord run_bo(const RunConfig &cfg, const BlackBox &objective,
                 const RunOptions &opts) {
  cfg.validate();
  const nlohmann::json cfg_json = config_to_json(cfg);

  RunRecord record;
  record.config = cfg_json;
  if (!opts.record_path.empty() && opts.resume && fs::exists(opts.record_path)) {
    bool truncated = false;
    RunRecord old = read_record(opts.record_path, &truncated);
    nlohmann::json a = old.config, b = cfg_json;
    // the epoch budget may grow between sessions
    for (const char *k : {"out", "epochs"}) {
      a.erase(k);
      b.erase(k);
    }
    if (a != b)
      throw ConfigError("record '" + opts.record_path +
                        "' was written with a different configuration");
    record = std::move(old);
    record.config = cfg_json;
    if (record.epochs.size() > cfg.n_epochs)
      throw ConfigError("record already has more epochs than configured");
    say(opts, "resuming with " + std::to_string(record.trials.size()) +
                  " trials and " + std::to_string(record.epochs.size()) +
                  " epochs" + (truncated ? " (dropped an incomplete tail)" : ""));
  }

  std::unique_ptr<RecordWriter> writer;
  if (!opts.record_path.empty()) {
    const fs::path parent = fs::path(opts.record_path).parent_path();
    if (!parent.empty())
      fs::create_directories(parent);
    writer = std::make_unique<RecordWriter>(opts.record_path, record, true);
  }

  // Initial design, continuing where a previous run stopped.
  const auto design = initial_design(cfg);
  if (record.epochs.empty() && record.trials.size() < cfg.n_init) {
    for (std::size_t i = record.trials.size(); i < cfg.n_init; ++i) {
      TrialEntry t = evaluate_trial(objective, design[i], i, 0, cfg.seed);
      record.trials.push_back(t);
      if (writer)
        writer->append(t);
    }
    say(opts, "initial design done: " + std::to_string(cfg.n_init) + " trials");
  }

  for (std::size_t e = record.epochs.size() + 1; e <= cfg.n_epochs; ++e) {
    const Dataset data = record.dataset();
    const GPModel model = fit(
        data, derive_seed(cfg.seed, {tag(SeedTag::Fit), e}), fit_options(cfg, record));
    const CandidateBatch batch = optimize_batch(
        model, data,
        cfg.acq_config(derive_seed(cfg.seed, {tag(SeedTag::Acquisition), e})));

    Eigen::MatrixXd xq(static_cast<Eigen::Index>(batch.points.size()), kNumParams);
    for (std::size_t j = 0; j < batch.points.size(); ++j)
      xq.row(static_cast<Eigen::Index>(j)) = batch.points[j].to_array().transpose();
    const double batch_var = model.posterior(xq).raw_variance().maxCoeff();
    const double dis = batch_dissimilarity(record.points(), batch.points);

    const auto trials = evaluate_batch(objective, batch.points,
                                       record.trials.size(), e, cfg.seed,
                                       opts.parallel);
    for (const auto &t : trials) {
      record.trials.push_back(t);
      if (writer)
        writer->append(t);
    }

    EpochEntry entry;
    entry.metrics.epoch = static_cast<int>(e);
    entry.batch_max_var = batch_var;
    entry.metrics.max_post_var =
        record.epochs.empty()
            ? batch_var
            : std::max(record.epochs.back().metrics.max_post_var, batch_var);
    entry.metrics.dissimilarity = dis;
    entry.metrics.best_observed = record.trials[record.incumbent()].y;
    entry.hyper = model.hyper();
    entry.y_mean = model.y_mean();
    entry.y_std = model.y_std();
    entry.acq_value = batch.acq_value;
    record.epochs.push_back(entry);
    if (writer)
      writer->append(entry);
    say(opts, "epoch " + std::to_string(e) + "/" + std::to_string(cfg.n_epochs) +
                  ": best " + std::to_string(entry.metrics.best_observed) +
                  ", dissimilarity " + std::to_string(dis) + ", max var " +
                  std::to_string(entry.metrics.max_post_var));
  }
  return record;
}

RunRecord run_bo(const RunConfig &cfg, const RunOptions &opts) {
  RunOptions o = opts;
  if (o.record_path.empty())
    o.record_path = (fs::path(cfg.out_dir) / "record.jsonl").string();
  const BlackBox f = swarm_black_box(cfg.consts, load_mazes(cfg.maze_dir),
                                     cfg.cutoff_s, o.parallel);
  return run_bo(cfg, f, o);
}

std::vector<double> best_observed_trace(const RunRecord &record) {
  if (record.trials.empty())
    throw std::invalid_argument("best_observed_trace: empty record");
  std::vector<double> ys;
  for (const auto &t : record.trials)
    ys.push_back(t.y);
  return running_max(ys);
}

GPModel fit_record(const RunRecord &record) {
  const RunConfig cfg = config_from_json(record.config);
  FitOptions f = fit_options(cfg, record);
  return fit(record.dataset(), derive_seed(cfg.seed, {tag(SeedTag::Export)}), f);
}

}  // namespace swarmbo
