#include "impacteq/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace impacteq {

namespace {

using Json = nlohmann::json;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw ConfigError(where + ": " + msg);
}

double parse_double(const std::string& raw, const std::string& where) {
  double out = 0.0;
  const char* first = raw.data();
  const char* last = raw.data() + raw.size();
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc() || res.ptr != last)
    fail(where, "expected a number, got '" + raw + "'");
  return out;
}

long long parse_int(const std::string& raw, const std::string& where) {
  long long out = 0;
  const char* first = raw.data();
  const char* last = raw.data() + raw.size();
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc() || res.ptr != last)
    fail(where, "expected an integer, got '" + raw + "'");
  return out;
}

std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(raw);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Uniform typed access for a key's value from either input encoding.
struct IniValue {
  const std::string& raw;
  const std::string& where;

  double number() const { return parse_double(raw, where); }
  long long integer() const { return parse_int(raw, where); }
  std::vector<double> numbers() const {
    std::vector<double> out;
    for (const std::string& item : split_list(raw))
      out.push_back(parse_double(item, where));
    return out;
  }
  std::vector<std::string> strings() const { return split_list(raw); }
  std::string text() const { return raw; }
};

struct JsonValue {
  const Json& v;
  const std::string& where;

  double number() const {
    if (!v.is_number()) fail(where, "expected a number");
    return v.get<double>();
  }
  long long integer() const {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    return v.get<long long>();
  }
  std::vector<double> numbers() const {
    if (!v.is_array()) fail(where, "expected an array of numbers");
    std::vector<double> out;
    for (const Json& e : v) {
      if (!e.is_number()) fail(where, "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  std::vector<std::string> strings() const {
    if (v.is_string()) return split_list(v.get<std::string>());
    if (!v.is_array()) fail(where, "expected an array of strings");
    std::vector<std::string> out;
    for (const Json& e : v) {
      if (!e.is_string()) fail(where, "expected an array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }
  std::string text() const {
    if (!v.is_string()) fail(where, "expected a string");
    return v.get<std::string>();
  }
};

int checked_int(long long v, long long lo, long long hi,
                const std::string& where) {
  if (v < lo || v > hi) fail(where, "value out of range");
  return static_cast<int>(v);
}

template <class V>
void apply_key(RunConfig& c, const std::string& sec, const std::string& key,
               const V& v, const std::string& where) {
  if (sec == "model") {
    if (key == "a") c.model.a = v.number();
    else if (key == "delta") c.model.delta = v.number();
    else if (key == "mu_D") c.model.mu_D = v.number();
    else if (key == "sigma_D") c.model.sigma_D = v.number();
    else if (key == "D0") c.model.D0 = v.number();
    else if (key == "mu_Y") c.model.mu_Y = v.number();
    else if (key == "sigma_Y") c.model.sigma_Y = v.number();
    else if (key == "rho") c.model.rho = v.number();
    else if (key == "L") c.model.L = v.number();
    else if (key == "I") c.model.I = checked_int(v.integer(), 2, 10000, where);
    else if (key == "T") c.model.T = v.number();
    else fail(where, "unknown key '" + key + "' in section [model]");
  } else if (sec == "nash") {
    if (key == "alpha") c.model.alpha = v.number();
    else if (key == "endowment_sd") c.endowment_sd = v.number();
    else if (key == "endowments") {
      c.endowments = v.numbers();
      c.explicit_endowments = true;
    } else fail(where, "unknown key '" + key + "' in section [nash]");
  } else if (sec == "numerics") {
    if (key == "steps_per_year")
      c.steps_per_year = checked_int(v.integer(), 1, 100000000, where);
    else if (key == "bisection_rel_tol") c.bisection_rel_tol = v.number();
    else if (key == "mc_paths")
      c.mc_paths = checked_int(v.integer(), 2, 1000000000, where);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(v.integer());
    else if (key == "mc_steps_per_year")
      c.mc_steps_per_year = checked_int(v.integer(), 1, 100000000, where);
    else if (key == "metric_grid_points")
      c.metric_grid_points = checked_int(v.integer(), 1, 1000000, where);
    else fail(where, "unknown key '" + key + "' in section [numerics]");
  } else if (sec == "output") {
    if (key == "directory") c.out_directory = v.text();
    else if (key == "formats") c.formats = v.strings();
    else fail(where, "unknown key '" + key + "' in section [output]");
  } else {
    fail(where, "unknown section [" + sec + "]");
  }
}

RunConfig parse_ini(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::string section;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    const std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(where, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "model" && section != "nash" && section != "numerics" &&
          section != "output")
        fail(where, "unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(where, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) fail(where, "key outside of any section");
    if (key.empty()) fail(where, "empty key");
    apply_key(cfg, section, key, IniValue{value, where}, where);
  }
  return cfg;
}

RunConfig parse_json_text(const std::string& text, const std::string& origin) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!root.is_object()) throw ConfigError(origin + ": expected an object");
  RunConfig cfg;
  for (const auto& [sec, body] : root.items()) {
    const std::string sec_where = origin + ": [" + sec + "]";
    if (!body.is_object()) fail(sec_where, "expected an object of keys");
    for (const auto& [key, value] : body.items()) {
      const std::string where = origin + ": " + sec + "." + key;
      apply_key(cfg, sec, key, JsonValue{value, where}, where);
    }
  }
  return cfg;
}

}  // namespace

ModelParams RunConfig::params() const {
  ModelParams p = model;
  if (explicit_endowments)
    p.endowments = endowments;
  else
    p.endowments = endowments_from_sd(p.I, p.L, endowment_sd);
  try {
    p.validate();
  } catch (const ParamError& e) {
    throw ConfigError(std::string("invalid model parameters: ") + e.what());
  }
  return p;
}

SolverOptions RunConfig::solver_options() const {
  SolverOptions opt;
  opt.steps_per_year = steps_per_year;
  opt.shoot_rel_tol = bisection_rel_tol;
  return opt;
}

McOptions RunConfig::mc_options() const {
  McOptions opt;
  opt.n_paths = mc_paths;
  opt.seed = seed;
  opt.steps_per_year = mc_steps_per_year;
  return opt;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    if (ch == '{') return parse_json_text(text, origin);
    break;
  }
  return parse_ini(text, origin);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

namespace {

void put(std::string& out, const char* key, double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%s=%.17g\n", key, v);
  out += b;
}

void put(std::string& out, const char* key, long long v) {
  out += key;
  out += "=";
  out += std::to_string(v);
  out += "\n";
}

}  // namespace

std::string canonical_config_string(const RunConfig& c) {
  std::string s;
  put(s, "model.a", c.model.a);
  put(s, "model.delta", c.model.delta);
  put(s, "model.mu_D", c.model.mu_D);
  put(s, "model.sigma_D", c.model.sigma_D);
  put(s, "model.D0", c.model.D0);
  put(s, "model.mu_Y", c.model.mu_Y);
  put(s, "model.sigma_Y", c.model.sigma_Y);
  put(s, "model.rho", c.model.rho);
  put(s, "model.L", c.model.L);
  put(s, "model.I", static_cast<long long>(c.model.I));
  put(s, "model.T", c.model.T);
  put(s, "nash.alpha", c.model.alpha);
  if (c.explicit_endowments) {
    s += "nash.endowments=";
    for (std::size_t i = 0; i < c.endowments.size(); ++i) {
      char b[32];
      std::snprintf(b, sizeof b, i ? ",%.17g" : "%.17g", c.endowments[i]);
      s += b;
    }
    s += "\n";
  } else {
    put(s, "nash.endowment_sd", c.endowment_sd);
  }
  put(s, "numerics.steps_per_year",
      static_cast<long long>(c.steps_per_year));
  put(s, "numerics.bisection_rel_tol", c.bisection_rel_tol);
  put(s, "numerics.mc_paths", static_cast<long long>(c.mc_paths));
  put(s, "numerics.seed", static_cast<long long>(c.seed));
  put(s, "numerics.mc_steps_per_year",
      static_cast<long long>(c.mc_steps_per_year));
  put(s, "numerics.metric_grid_points",
      static_cast<long long>(c.metric_grid_points));
  return s;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash(const RunConfig& cfg) {
  char b[24];
  std::snprintf(b, sizeof b, "%016llx",
                static_cast<unsigned long long>(
                    fnv1a64(canonical_config_string(cfg))));
  return b;
}

}  // namespace impacteq
