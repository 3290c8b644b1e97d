#include "swarmbo/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace swarmbo {
namespace {

  using nlohmann::json;

  template <class T>
  void take(const json &j, const char *key, T &out) {
    if (!j.contains(key))
      return;
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception &e) {
      throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
  }

  std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
      return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  // Strips a trailing comment that is not inside a string.
  std::string strip_comment(const std::string &s) {
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"' && (i == 0 || s[i - 1] != '\\'))
        in_str = !in_str;
      else if (s[i] == '#' && !in_str)
        return s.substr(0, i);
    }
    return s;
  }

  json parse_value(const std::string &v, int line) {
    auto fail = [&](const std::string &what) {
      return ConfigError("TOML line " + std::to_string(line) + ": " + what);
    };
    if (v.empty())
      throw fail("missing value");
    if (v.front() == '"') {
      if (v.size() < 2 || v.back() != '"')
        throw fail("unterminated string");
      std::string out;
      for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        char c = v[i];
        if (c == '\\' && i + 2 < v.size()) {
          const char n = v[++i];
          switch (n) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '\\': c = '\\'; break;
          case '"': c = '"'; break;
          default: throw fail(std::string("unsupported escape \\") + n);
          }
        }
        out += c;
      }
      return out;
    }
    if (v == "true")
      return true;
    if (v == "false")
      return false;
    std::string num;
    for (char c : v)
      if (c != '_')
        num += c;
    std::size_t pos = 0;
    const bool is_float = num.find_first_of(".eE") != std::string::npos ||
                          num == "inf" || num == "nan";
    try {
      if (is_float) {
        const double d = std::stod(num, &pos);
        if (pos == num.size())
          return d;
      } else {
        const long long i = std::stoll(num, &pos);
        if (pos == num.size())
          return i;
      }
    } catch (const std::exception &) {
    }
    throw fail("unsupported value '" + v + "'");
  }

}  // namespace

void RunConfig::validate() const {
  if (n_init < 2)
    throw ConfigError("n_init must be >= 2");
  if (n_epochs < 1)
    throw ConfigError("n_epochs must be >= 1");
  if (q < 1)
    throw ConfigError("q must be >= 1");
  if (n_mc < 1)
    throw ConfigError("n_mc must be >= 1");
  if (!(cutoff_s > 0.0))
    throw ConfigError("cutoff_s must be positive");
  if (cutoff_s > consts.duration)
    throw ConfigError("cutoff_s exceeds the episode duration");
  if (n_raw < 1 || n_starts < 1 || fit_restarts < 1)
    throw ConfigError("n_raw, n_starts and fit_restarts must be >= 1");
  try {
    consts.validate();
  } catch (const std::exception &e) {
    throw ConfigError(e.what());
  }
}

AcqConfig RunConfig::acq_config(std::uint64_t s) const {
  AcqConfig a;
  a.kind = acq;
  a.n_mc = n_mc;
  a.q = q;
  a.n_raw = n_raw;
  a.n_starts = n_starts;
  a.max_iterations = acq_iterations;
  a.seed = s;
  return a;
}

nlohmann::json config_to_json(const RunConfig &cfg) {
  const SwarmConstants &c = cfg.consts;
  return json{
      {"acq", to_string(cfg.acq)},
      {"init", cfg.n_init},
      {"epochs", cfg.n_epochs},
      {"batch", cfg.q},
      {"mc", cfg.n_mc},
      {"cutoff_s", cfg.cutoff_s},
      {"maze_dir", cfg.maze_dir},
      {"seed", cfg.seed},
      {"out", cfg.out_dir},
      {"n_raw", cfg.n_raw},
      {"n_starts", cfg.n_starts},
      {"acq_iterations", cfg.acq_iterations},
      {"fit_restarts", cfg.fit_restarts},
      {"fit_iterations", cfg.fit_iterations},
      {"consts",
       {{"agents", c.n_agents},
        {"dt", c.dt},
        {"duration", c.duration},
        {"e_max", c.e_max},
        {"mu_m", c.mu_m},
        {"g_s", c.g_s},
        {"g_r", c.g_r},
        {"g_c", c.g_c},
        {"d_rad", c.d_rad},
        {"w_floor", c.w_floor}}},
  };
}

void apply_config_json(RunConfig &cfg, const nlohmann::json &j) {
  static const char *const kTop[] = {
      "acq", "init", "epochs", "batch", "mc", "cutoff_s", "maze_dir", "seed",
      "out", "n_raw", "n_starts", "acq_iterations", "fit_restarts",
      "fit_iterations", "agents", "consts"};
  static const char *const kConsts[] = {"agents", "dt", "duration", "e_max",
                                        "mu_m", "g_s", "g_r", "g_c", "d_rad",
                                        "w_floor"};
  if (!j.is_object())
    throw ConfigError("config must be a table");
  for (const auto &[k, v] : j.items()) {
    if (std::find(std::begin(kTop), std::end(kTop), k) == std::end(kTop))
      throw ConfigError("unknown config key '" + k + "'");
  }
  if (j.contains("acq")) {
    try {
      cfg.acq = parse_acq_kind(j.at("acq").get<std::string>());
    } catch (const std::exception &e) {
      throw ConfigError(std::string("config key 'acq': ") + e.what());
    }
  }
  take(j, "init", cfg.n_init);
  take(j, "epochs", cfg.n_epochs);
  take(j, "batch", cfg.q);
  take(j, "mc", cfg.n_mc);
  take(j, "cutoff_s", cfg.cutoff_s);
  take(j, "maze_dir", cfg.maze_dir);
  take(j, "seed", cfg.seed);
  take(j, "out", cfg.out_dir);
  take(j, "n_raw", cfg.n_raw);
  take(j, "n_starts", cfg.n_starts);
  take(j, "acq_iterations", cfg.acq_iterations);
  take(j, "fit_restarts", cfg.fit_restarts);
  take(j, "fit_iterations", cfg.fit_iterations);
  take(j, "agents", cfg.consts.n_agents);
  if (j.contains("consts")) {
    const json &c = j.at("consts");
    if (!c.is_object())
      throw ConfigError("'consts' must be a table");
    for (const auto &[k, v] : c.items()) {
      if (std::find(std::begin(kConsts), std::end(kConsts), k) ==
          std::end(kConsts))
        throw ConfigError("unknown config key 'consts." + k + "'");
    }
    SwarmConstants &s = cfg.consts;
    take(c, "agents", s.n_agents);
    take(c, "dt", s.dt);
    take(c, "duration", s.duration);
    take(c, "e_max", s.e_max);
    take(c, "mu_m", s.mu_m);
    take(c, "g_s", s.g_s);
    take(c, "g_r", s.g_r);
    take(c, "g_c", s.g_c);
    take(c, "d_rad", s.d_rad);
    take(c, "w_floor", s.w_floor);
  }
}

RunConfig config_from_json(const nlohmann::json &j) {
  RunConfig cfg;
  apply_config_json(cfg, j);
  return cfg;
}

nlohmann::json parse_toml(const std::string &text) {
  json root = json::object();
  json *table = &root;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty())
      continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3)
        throw ConfigError("TOML line " + std::to_string(line) +
                          ": malformed table header");
      const std::string name = trim(s.substr(1, s.size() - 2));
      if (name.find_first_of(".[]\"") != std::string::npos)
        throw ConfigError("TOML line " + std::to_string(line) +
                          ": only single-level tables are supported");
      if (root.contains(name))
        throw ConfigError("TOML line " + std::to_string(line) +
                          ": duplicate table '" + name + "'");
      root[name] = json::object();
      table = &root[name];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("TOML line " + std::to_string(line) + ": expected key = value");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty() || !std::all_of(key.begin(), key.end(), [](unsigned char c) {
          return std::isalnum(c) || c == '_' || c == '-';
        }))
      throw ConfigError("TOML line " + std::to_string(line) + ": bad key '" + key + "'");
    if (table->contains(key))
      throw ConfigError("TOML line " + std::to_string(line) + ": duplicate key '" + key + "'");
    (*table)[key] = parse_value(trim(s.substr(eq + 1)), line);
  }
  return root;
}

RunConfig load_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
    j = json::parse(ss.str());
  else
    j = parse_toml(ss.str());
  return config_from_json(j);
}

}  // namespace swarmbo
