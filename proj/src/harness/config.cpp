#include "anosov/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace anosov {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  const double d = std::stod(v, &used);
  if (trim(v.substr(used)) != "") throw std::invalid_argument("trailing characters");
  return d;
}

long long to_int(const std::string& v) {
  std::size_t used = 0;
  const long long d = std::stoll(v, &used);
  if (trim(v.substr(used)) != "") throw std::invalid_argument("trailing characters");
  return d;
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  return out;
}

std::string from_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

struct Field {
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

template <class T>
Field count_field(const std::string& key, T ExperimentConfig::*m, long long lo) {
  return {key, [m](const ExperimentConfig& c) { return std::to_string(c.*m); },
          [m, lo, key](ExperimentConfig& c, const std::string& v) {
            const long long x = to_int(v);
            if (x < lo) throw std::invalid_argument("must be >= " + std::to_string(lo));
            c.*m = static_cast<T>(x);
          }};
}

Field real_field(const std::string& key, double ExperimentConfig::*m) {
  return {key, [m](const ExperimentConfig& c) { return fmt(c.*m); },
          [m](ExperimentConfig& c, const std::string& v) { c.*m = to_double(v); }};
}

Field list_field(const std::string& key, std::vector<double> ExperimentConfig::*m) {
  return {key, [m](const ExperimentConfig& c) { return from_list(c.*m); },
          [m](ExperimentConfig& c, const std::string& v) {
            auto l = to_list(v);
            if (l.empty()) throw std::invalid_argument("empty list");
            c.*m = std::move(l);
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      {"map.matrix",
       [](const ExperimentConfig& c) {
         const auto& m = c.model.m;
         return std::to_string(m.a) + "," + std::to_string(m.b) + "," + std::to_string(m.c) + "," + std::to_string(m.d);
       },
       [](ExperimentConfig& c, const std::string& v) {
         const auto l = to_list(v);
         if (l.size() != 4) throw std::invalid_argument("expected 4 integers a,b,c,d");
         for (double x : l)
           if (x != std::floor(x)) throw std::invalid_argument("entries must be integers");
         c.model.m = {static_cast<std::int64_t>(l[0]), static_cast<std::int64_t>(l[1]), static_cast<std::int64_t>(l[2]),
                      static_cast<std::int64_t>(l[3])};
       }},
      {"map.k", [](const ExperimentConfig& c) { return std::to_string(c.model.k); },
       [](ExperimentConfig& c, const std::string& v) {
         const long long k = to_int(v);
         if (k < 1) throw std::invalid_argument("must be >= 1");
         c.model.k = static_cast<int>(k);
       }},
      {"map.p", [](const ExperimentConfig& c) { return fmt(c.model.p.x) + "," + fmt(c.model.p.y); },
       [](ExperimentConfig& c, const std::string& v) {
         const auto l = to_list(v);
         if (l.size() != 2) throw std::invalid_argument("expected x,y");
         c.model.p = {l[0], l[1]};
       }},
      {"map.q", [](const ExperimentConfig& c) { return fmt(c.model.q.x) + "," + fmt(c.model.q.y); },
       [](ExperimentConfig& c, const std::string& v) {
         const auto l = to_list(v);
         if (l.size() != 2) throw std::invalid_argument("expected x,y");
         c.model.q = {l[0], l[1]};
       }},
      {"map.frame_rule", [](const ExperimentConfig& c) { return to_string(c.model.rule); },
       [](ExperimentConfig& c, const std::string& v) { c.model.rule = parse_frame_rule(v); }},
      {"map.r", [](const ExperimentConfig& c) { return fmt(c.model.r); },
       [](ExperimentConfig& c, const std::string& v) { c.model.r = to_double(v); }},
      {"map.t", [](const ExperimentConfig& c) { return fmt(c.model.t); },
       [](ExperimentConfig& c, const std::string& v) {
         const double t = to_double(v);
         if (t < 0.0 || t > 1.0) throw std::invalid_argument("t must lie in [0, 1]");
         c.model.t = t;
       }},
      {"map.profile", [](const ExperimentConfig& c) { return to_string(c.model.profile); },
       [](ExperimentConfig& c, const std::string& v) { c.model.profile = parse_profile(v); }},
      {"map.tangency_alpha", [](const ExperimentConfig& c) { return fmt(c.model.alpha); },
       [](ExperimentConfig& c, const std::string& v) { c.model.alpha = to_double(v); }},
      real_field("conjugacy.tol", &ExperimentConfig::conj_tol),
      count_field("conjugacy.nodes_per_unit", &ExperimentConfig::conj_nodes_per_unit, 64),
      {"conjugacy.grid_path", [](const ExperimentConfig& c) { return c.grid_path; },
       [](ExperimentConfig& c, const std::string& v) { c.grid_path = v; }},
      count_field("cones.samples", &ExperimentConfig::cone_samples, 1),
      real_field("cones.epsilon", &ExperimentConfig::cone_epsilon),
      count_field("tangency.scales", &ExperimentConfig::tangency_scales, 3),
      real_field("tangency.rho_max", &ExperimentConfig::tangency_rho_max),
      count_field("persistence.grid", &ExperimentConfig::persistence_grid, 2),
      count_field("persistence.M", &ExperimentConfig::persistence_M, 1),
      list_field("persistence.t", &ExperimentConfig::persistence_ts),
      count_field("holder.pairs", &ExperimentConfig::holder_pairs, 1),
      real_field("holder.scale0", &ExperimentConfig::holder_scale0),
      count_field("holder.scales", &ExperimentConfig::holder_scales, 5),
      count_field("beak.samples", &ExperimentConfig::beak_samples, 1),
      count_field("spectrum.period_cap", &ExperimentConfig::period_cap, 1),
      count_field("spectrum.probe_n", &ExperimentConfig::probe_n, 1),
      count_field("shadow.window", &ExperimentConfig::shadow_window, 1),
      list_field("shadow.xi", &ExperimentConfig::shadow_xis),
      list_field("fisher.eps", &ExperimentConfig::fisher_eps),
      count_field("fisher.window", &ExperimentConfig::fisher_window, 1),
      {"run.seed", [](const ExperimentConfig& c) { return std::to_string(c.seed); },
       [](ExperimentConfig& c, const std::string& v) {
         std::size_t used = 0;
         const auto s = std::stoull(v, &used);
         if (trim(v.substr(used)) != "" || trim(v).front() == '-') throw std::invalid_argument("expected unsigned 64-bit");
         c.seed = s;
       }},
      {"run.out", [](const ExperimentConfig& c) { return c.out; },
       [](ExperimentConfig& c, const std::string& v) { c.out = v; }},
  };
  return f;
}

const Field* find_field(const std::string& key) {
  for (const auto& f : fields())
    if (f.key == key) return &f;
  return nullptr;
}

void set_value(ExperimentConfig& cfg, const std::string& key, const std::string& value, const std::string& where) {
  const Field* f = find_field(key);
  if (!f) throw ConfigError(where, "unknown key '" + key + "'");
  try {
    f->set(cfg, value);
  } catch (const std::exception& e) {
    throw ConfigError(where, "bad value for '" + key + "' ('" + value + "'): " + e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno);
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where, "expected key=value");
    const std::string key = trim(body.substr(0, eq));
    if (auto it = seen.find(key); it != seen.end())
      throw ConfigError(where, "duplicate key '" + key + "' (first at line " + std::to_string(it->second) + ")");
    seen[key] = lineno;
    set_value(cfg, key, trim(body.substr(eq + 1)), where);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::map<std::string, std::string> config_entries(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> m;
  for (const auto& f : fields()) m[f.key] = f.get(cfg);
  return m;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> k;
  for (const auto& f : fields()) k.push_back(f.key);
  return k;
}

std::string to_text(const ExperimentConfig& cfg) {
  std::string s;
  for (const auto& f : fields()) s += f.key + "=" + f.get(cfg) + "\n";
  return s;
}

std::string env_name(const std::string& key) {
  std::string e = "ANOSOV_";
  for (char c : key) e += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return e;
}

std::vector<std::string> apply_env(ExperimentConfig& cfg, const std::map<std::string, std::string>& env) {
  std::vector<std::string> applied;
  for (const auto& [name, value] : env) {
    if (name.rfind("ANOSOV_", 0) != 0) continue;
    const bool known = std::any_of(fields().begin(), fields().end(), [&](const Field& f) { return env_name(f.key) == name; });
    if (!known) throw ConfigError("env " + name, "no config key maps to this variable");
  }
  for (const auto& f : fields()) {
    const auto it = env.find(env_name(f.key));
    if (it == env.end()) continue;
    set_value(cfg, f.key, trim(it->second), "env " + it->first);
    applied.push_back(f.key);
  }
  return applied;
}

}  // namespace anosov
