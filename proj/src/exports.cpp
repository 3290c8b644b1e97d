#include "swarmbo/exports.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "swarmbo/config.hpp"
#include "swarmbo/csv.hpp"
#include "swarmbo/objective.hpp"
#include "swarmbo/orchestrator.hpp"
#include "swarmbo/seeding.hpp"

namespace swarmbo {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

  std::vector<std::string> param_header() {
    std::vector<std::string> h;
    for (auto n : ParamVector::kNames)
      h.emplace_back(n);
    return h;
  }

  void write_text(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out)
      throw std::runtime_error("write failed on '" + path + "'");
  }

  json params_json(const ParamVector &p) {
    json j = json::object();
    for (std::size_t i = 0; i < kNumParams; ++i)
      j[std::string(ParamVector::kNames[i])] = p[i];
    return j;
  }

}  // namespace

ParamVector default_params() {
  ParamVector p;
  p.sigma = 2.0;
  p.eta_s = 1.0;
  p.eta_r = 1.0;
  p.kappa = 6.6;
  p.omega_0 = 0.5;
  p.omega_I = 0.5;
  p.tau_q = 0.5;
  p.tau_r = 0.5;
  p.tau_c = 0.5;
  return p;
}

ParamVector load_params(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open params '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception &e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  ParamVector p;
  for (std::size_t i = 0; i < kNumParams; ++i) {
    const std::string name(ParamVector::kNames[i]);
    if (!j.contains(name))
      throw std::runtime_error(path + ": missing parameter '" + name + "'");
    p[i] = j.at(name).get<double>();
  }
  for (const auto &[k, v] : j.items())
    if (std::find(ParamVector::kNames.begin(), ParamVector::kNames.end(), k) ==
        ParamVector::kNames.end())
      throw std::runtime_error(path + ": unknown parameter '" + k + "'");
  return p;
}

void save_params(const ParamVector &p, const std::string &path) {
  write_text(path, params_json(p).dump(2) + "\n");
}

ReplayOutput replay(const ParamVector &params, const MazeSpec &maze,
                    const SwarmConstants &consts, std::uint64_t seed,
                    const std::string &out_dir, const std::string &prefix) {
  ReplayOutput out;
  out.params = params.clamped(&out.clamped);
  EpisodeOptions eo;
  eo.record_trajectory = true;
  eo.trajectory_every = 10;
  out.result = run_episode(maze, out.params, consts, seed, consts.duration, eo);

  fs::create_directories(out_dir);
  const std::string stem = prefix.empty() ? maze.name : prefix;
  out.trajectory_path = (fs::path(out_dir) / (stem + "_trajectory.csv")).string();
  out.captures_path = (fs::path(out_dir) / (stem + "_captures.csv")).string();
  out.capture_agents_path =
      (fs::path(out_dir) / (stem + "_capture_agents.csv")).string();

  CsvWriter traj(out.trajectory_path, {"t_s", "agent_id", "x", "y"});
  for (const auto &f : out.result.trajectory) {
    const double t_s = static_cast<double>(f.step) * consts.dt;
    for (std::size_t i = 0; i < f.positions.size(); ++i) {
      traj << t_s << i << f.positions[i].x << f.positions[i].y;
      traj.end_row();
    }
  }
  traj.close();

  CsvWriter caps(out.captures_path, {"reward_id", "t_s", "n_agents_in_radius"});
  CsvWriter who(out.capture_agents_path, {"reward_id", "agent_id"});
  for (const auto &ev : out.result.events) {
    caps << ev.reward_id << static_cast<double>(ev.step) * consts.dt
         << ev.n_agents_in_radius;
    caps.end_row();
    for (auto a : ev.agents) {
      who << ev.reward_id << a;
      who.end_row();
    }
  }
  caps.close();
  who.close();
  return out;
}

std::vector<AnticipatedRow> anticipate(const GPModel &model, const Dataset &data,
                                       AcqConfig cfg, std::size_t n_samples) {
  if (!model.fitted())
    throw GPError("anticipate requires a fitted model");
  if (cfg.kind == AcqKind::Random)
    cfg.kind = AcqKind::QEI;
  const std::uint64_t base = cfg.seed;
  std::vector<ParamVector> points;
  for (std::uint64_t i = 0; points.size() < n_samples; ++i) {
    cfg.seed = derive_seed(base, {tag(SeedTag::Anticipate), i});
    const CandidateBatch b = optimize_batch(model, data, cfg);
    for (const auto &p : b.points)
      if (points.size() < n_samples)
        points.push_back(p);
  }
  std::vector<AnticipatedRow> rows;
  if (points.empty())
    return rows;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(points.size()), kNumParams);
  for (std::size_t i = 0; i < points.size(); ++i)
    x.row(static_cast<Eigen::Index>(i)) = points[i].to_array().transpose();
  // Marginals only; the full covariance is not needed.
  for (std::size_t i = 0; i < points.size(); ++i) {
    const PosteriorGaussian post =
        model.posterior(Eigen::MatrixXd(x.row(static_cast<Eigen::Index>(i))));
    rows.push_back({points[i], post.raw_mean()[0], post.raw_variance()[0]});
  }
  return rows;
}

void write_anticipated(const std::vector<AnticipatedRow> &rows,
                       const std::string &path) {
  auto header = param_header();
  header.push_back("posterior_mean");
  header.push_back("posterior_var");
  CsvWriter w(path, header);
  for (const auto &r : rows) {
    for (std::size_t i = 0; i < kNumParams; ++i)
      w << r.params[i];
    w << r.posterior_mean << r.posterior_var;
    w.end_row();
  }
  w.close();
}

std::vector<HistogramBin> objective_histogram(const std::vector<double> &ys) {
  std::vector<HistogramBin> bins(kHistogramBins);
  const double width = 1.0 / kHistogramBins;
  for (int b = 0; b < kHistogramBins; ++b) {
    bins[static_cast<std::size_t>(b)].lo = -1.0 + b * width;
    bins[static_cast<std::size_t>(b)].hi = -1.0 + (b + 1) * width;
  }
  bins.back().hi = 0.0;
  for (double y : ys) {
    int b = static_cast<int>(std::floor((std::clamp(y, -1.0, 0.0) + 1.0) / width));
    b = std::clamp(b, 0, kHistogramBins - 1);
    ++bins[static_cast<std::size_t>(b)].count;
  }
  return bins;
}

void export_viz(const RunRecord &record, const GPModel &model,
                const std::string &out_dir, const ExportOptions &opts) {
  if (record.trials.empty())
    throw std::invalid_argument("export_viz: empty record");
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  const RunConfig cfg = config_from_json(record.config);
  const Dataset data = record.dataset();
  const auto trace = best_observed_trace(record);

  {
    const PosteriorGaussian post = model.posterior(data.X);
    const Eigen::VectorXd mean = post.raw_mean();
    const Eigen::VectorXd var = post.raw_variance();
    auto header = param_header();
    for (const char *c : {"y", "posterior_mean", "posterior_var", "best_observed"})
      header.emplace_back(c);
    CsvWriter w((dir / "samples.csv").string(), header);
    for (std::size_t i = 0; i < record.trials.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      for (std::size_t d = 0; d < kNumParams; ++d)
        w << record.trials[i].params[d];
      w << record.trials[i].y << mean[r] << var[r] << trace[i];
      w.end_row();
    }
    w.close();
  }
  {
    CsvWriter w((dir / "metrics.csv").string(),
                {"epoch", "max_post_var", "batch_max_var", "dissimilarity",
                 "best_observed"});
    for (const auto &e : record.epochs) {
      w << e.metrics.epoch << e.metrics.max_post_var << e.batch_max_var
        << e.metrics.dissimilarity << e.metrics.best_observed;
      w.end_row();
    }
    w.close();
  }
  {
    std::vector<double> ys;
    for (const auto &t : record.trials)
      ys.push_back(t.y);
    CsvWriter w((dir / "histogram.csv").string(), {"bin_lo", "bin_hi", "count"});
    for (const auto &b : objective_histogram(ys)) {
      w << b.lo << b.hi << b.count;
      w.end_row();
    }
    w.close();
  }
  {
    CsvWriter w((dir / "best_observed.csv").string(),
                {"trial", "epoch", "y", "best_observed"});
    for (std::size_t i = 0; i < record.trials.size(); ++i) {
      w << i << record.trials[i].epoch << record.trials[i].y << trace[i];
      w.end_row();
    }
    w.close();
  }

  const std::size_t inc = record.incumbent();
  const TrialEntry &best = record.trials[inc];
  const auto mazes = load_mazes(cfg.maze_dir);
  save_maze(mazes.first, (dir / "hairpin.json").string());
  save_maze(mazes.second, (dir / "tunnel.json").string());

  json info{{"acq", to_string(cfg.acq)},
            {"n_trials", record.trials.size()},
            {"n_epochs", record.epochs.size()},
            {"incumbent_trial", inc},
            {"incumbent_y", best.y},
            {"incumbent_params", params_json(best.params)},
            {"dt", cfg.consts.dt},
            {"d_rad", cfg.consts.d_rad},
            {"config", record.config}};

  if (opts.replay_incumbent) {
    // Same seeds as the scored episodes, continued to the full duration.
    const auto [seed_h, seed_t] = maze_seeds(best.seed);
    const auto rh = replay(best.params, mazes.first, cfg.consts, seed_h, out_dir, "hairpin");
    const auto rt = replay(best.params, mazes.second, cfg.consts, seed_t, out_dir, "tunnel");
    info["replay"] = {{"hairpin_captured", rh.result.num_captured()},
                      {"tunnel_captured", rt.result.num_captured()},
                      {"hairpin_seed", seed_h},
                      {"tunnel_seed", seed_t}};
  }
  write_text((dir / "run_info.json").string(), info.dump(2) + "\n");
}

}  // namespace swarmbo
