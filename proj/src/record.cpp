#include "swarmbo/record.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace swarmbo {
namespace {

  using nlohmann::json;

  json params_to_json(const ParamVector &p) {
    json j = json::object();
    for (std::size_t i = 0; i < kNumParams; ++i)
      j[std::string(ParamVector::kNames[i])] = p[i];
    return j;
  }

  ParamVector params_from_json(const json &j) {
    ParamVector p;
    for (std::size_t i = 0; i < kNumParams; ++i)
      p[i] = j.at(std::string(ParamVector::kNames[i])).get<double>();
    return p;
  }

  json hyper_to_json(const GPHyperparams &h) {
    return json{{"mean_const", h.mean_const},
                {"output_scale", h.output_scale},
                {"length_scales", std::vector<double>(h.length_scales.data(),
                                                      h.length_scales.data() + kNumParams)},
                {"noise_var", h.noise_var}};
  }

  GPHyperparams hyper_from_json(const json &j) {
    GPHyperparams h;
    h.mean_const = j.at("mean_const").get<double>();
    h.output_scale = j.at("output_scale").get<double>();
    const auto ls = j.at("length_scales").get<std::vector<double>>();
    if (ls.size() != kNumParams)
      throw std::runtime_error("length_scales must have 9 entries");
    for (std::size_t i = 0; i < kNumParams; ++i)
      h.length_scales[static_cast<Eigen::Index>(i)] = ls[i];
    h.noise_var = j.at("noise_var").get<double>();
    return h;
  }

}  // namespace

bool operator==(const TrialEntry &a, const TrialEntry &b) {
  return a.index == b.index && a.epoch == b.epoch && a.params == b.params &&
         a.loss_hairpin == b.loss_hairpin && a.loss_tunnel == b.loss_tunnel &&
         a.y == b.y && a.seed == b.seed;
}

Dataset RunRecord::dataset() const {
  Dataset d;
  d.X.resize(static_cast<Eigen::Index>(trials.size()), kNumParams);
  d.y.resize(static_cast<Eigen::Index>(trials.size()));
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    d.X.row(r) = trials[i].params.to_array().transpose();
    d.y[r] = trials[i].y;
  }
  return d;
}

std::vector<ParamVector> RunRecord::points() const {
  std::vector<ParamVector> out;
  out.reserve(trials.size());
  for (const auto &t : trials)
    out.push_back(t.params);
  return out;
}

std::size_t RunRecord::incumbent() const {
  if (trials.empty())
    throw std::runtime_error("empty run record");
  std::size_t best = 0;
  for (std::size_t i = 1; i < trials.size(); ++i)
    if (trials[i].y > trials[best].y)
      best = i;
  return best;
}

json trial_to_json(const TrialEntry &t) {
  return json{{"type", "trial"},
              {"index", t.index},
              {"epoch", t.epoch},
              {"params", params_to_json(t.params)},
              {"loss_hairpin", t.loss_hairpin},
              {"loss_tunnel", t.loss_tunnel},
              {"y", t.y},
              {"seed", t.seed},
              {"wall_time", t.wall_time}};
}

TrialEntry trial_from_json(const json &j) {
  TrialEntry t;
  t.index = j.at("index").get<std::size_t>();
  t.epoch = j.at("epoch").get<std::size_t>();
  t.params = params_from_json(j.at("params"));
  t.loss_hairpin = j.at("loss_hairpin").get<double>();
  t.loss_tunnel = j.at("loss_tunnel").get<double>();
  t.y = j.at("y").get<double>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.wall_time = j.value("wall_time", 0.0);
  return t;
}

json epoch_to_json(const EpochEntry &e) {
  json j{{"type", "epoch"},
         {"epoch", e.metrics.epoch},
         {"max_post_var", e.metrics.max_post_var},
         {"batch_max_var", e.batch_max_var},
         {"dissimilarity", e.metrics.dissimilarity},
         {"best_observed", e.metrics.best_observed},
         {"hyper", hyper_to_json(e.hyper)},
         {"y_mean", e.y_mean},
         {"y_std", e.y_std}};
  j["acq_value"] = e.acq_value ? json(*e.acq_value) : json(nullptr);
  return j;
}

EpochEntry epoch_from_json(const json &j) {
  EpochEntry e;
  e.metrics.epoch = j.at("epoch").get<int>();
  e.metrics.max_post_var = j.at("max_post_var").get<double>();
  e.metrics.dissimilarity = j.at("dissimilarity").get<double>();
  e.metrics.best_observed = j.at("best_observed").get<double>();
  e.batch_max_var = j.at("batch_max_var").get<double>();
  e.hyper = hyper_from_json(j.at("hyper"));
  e.y_mean = j.at("y_mean").get<double>();
  e.y_std = j.at("y_std").get<double>();
  if (j.contains("acq_value") && !j.at("acq_value").is_null())
    e.acq_value = j.at("acq_value").get<double>();
  return e;
}

RecordWriter::RecordWriter(const std::string &path, const RunRecord &existing,
                           bool rewrite)
    : path_(path) {
  file_ = std::fopen(path.c_str(), rewrite ? "wb" : "ab");
  if (!file_)
    throw std::runtime_error("cannot open record '" + path + "'");
  if (rewrite) {
    json c = existing.config;
    c["type"] = "config";
    write_line(c);
    std::size_t e = 0;
    for (const auto &t : existing.trials) {
      while (e < existing.epochs.size() &&
             static_cast<std::size_t>(existing.epochs[e].metrics.epoch) < t.epoch)
        write_line(epoch_to_json(existing.epochs[e++]));
      write_line(trial_to_json(t));
    }
    while (e < existing.epochs.size())
      write_line(epoch_to_json(existing.epochs[e++]));
  }
}

RecordWriter::~RecordWriter() {
  if (file_)
    std::fclose(file_);
}

void RecordWriter::write_line(const json &j) {
  // Doubles are dumped by the library with round-trip precision.
  const std::string s = j.dump() + "\n";
  if (std::fwrite(s.data(), 1, s.size(), file_) != s.size() ||
      std::fflush(file_) != 0)
    throw std::runtime_error("write failed on record '" + path_ + "'");
}

void RecordWriter::append(const TrialEntry &t) { write_line(trial_to_json(t)); }
void RecordWriter::append(const EpochEntry &e) { write_line(epoch_to_json(e)); }

RunRecord read_record(const std::string &path, bool *truncated) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open record '" + path + "'");
  std::vector<json> lines;
  std::string s;
  bool dropped = false;
  std::size_t lineno = 0;
  while (std::getline(in, s)) {
    ++lineno;
    if (s.empty())
      continue;
    try {
      lines.push_back(json::parse(s));
    } catch (const json::parse_error &) {
      // Only the final line may be torn.
      if (in.peek() != EOF)
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": malformed record line");
      dropped = true;
    }
  }
  RunRecord r;
  bool have_config = false;
  for (const auto &j : lines) {
    const std::string type = j.value("type", "");
    try {
      if (type == "config") {
        r.config = j;
        r.config.erase("type");
        have_config = true;
      } else if (type == "trial") {
        r.trials.push_back(trial_from_json(j));
      } else if (type == "epoch") {
        r.epochs.push_back(epoch_from_json(j));
      } else {
        throw std::runtime_error("unknown line type '" + type + "'");
      }
    } catch (const std::exception &e) {
      throw std::runtime_error(path + ": " + e.what());
    }
  }
  if (!have_config)
    throw std::runtime_error(path + ": record has no config line");

  // Trials from an epoch without a closing epoch line are discarded.
  const std::size_t done = r.epochs.size();
  const auto before = r.trials.size();
  std::erase_if(r.trials, [&](const TrialEntry &t) { return t.epoch > done; });
  if (r.trials.size() != before)
    dropped = true;
  for (std::size_t i = 0; i < r.trials.size(); ++i)
    if (r.trials[i].index != i)
      throw std::runtime_error(path + ": trial indices are not consecutive");
  if (truncated)
    *truncated = dropped;
  return r;
}

RunRecord read_record(const std::string &path) {
  return read_record(path, nullptr);
}

void write_record(const RunRecord &record, const std::string &path) {
  RecordWriter w(path, record, true);
}

}  // namespace swarmbo
