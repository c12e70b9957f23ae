#pragma once
// Flat INI-style run configuration: [section] headers, key = value lines,
// '#' or ';' comments. Every error names the file and line.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bernstein.hpp"

namespace sublab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IniFile {
 public:
  struct Value {
    std::string text;
    int line = 0;
  };

  static IniFile parse(std::istream& in, const std::string& origin = "<config>") {
    IniFile ini;
    ini.origin_ = origin;
    std::string raw, section;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      std::string s = trim(strip_comment(raw));
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') ini.fail(line, "unterminated section header");
        section = trim(s.substr(1, s.size() - 2));
        if (section.empty()) ini.fail(line, "empty section name");
        if (ini.sections_.count(section)) ini.fail(line, "duplicate section [" + section + "]");
        ini.sections_[section] = line;
        continue;
      }
      auto eq = s.find('=');
      if (eq == std::string::npos) ini.fail(line, "expected 'key = value'");
      if (section.empty()) ini.fail(line, "key outside of any section");
      std::string key = trim(s.substr(0, eq)), val = trim(s.substr(eq + 1));
      if (key.empty()) ini.fail(line, "empty key");
      auto& sec = ini.values_[section];
      if (sec.count(key)) ini.fail(line, "duplicate key '" + key + "'");
      sec[key] = {val, line};
    }
    return ini;
  }

  static IniFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config");
    return parse(in, path);
  }

  bool has_section(const std::string& s) const { return sections_.count(s) > 0; }
  bool has(const std::string& s, const std::string& k) const {
    auto it = values_.find(s);
    return it != values_.end() && it->second.count(k);
  }

  const Value* find(const std::string& s, const std::string& k) const {
    auto it = values_.find(s);
    if (it == values_.end()) return nullptr;
    auto kt = it->second.find(k);
    if (kt == it->second.end()) return nullptr;
    used_.insert(s + "\x1f" + k);
    return &kt->second;
  }

  std::string str(const std::string& s, const std::string& k, std::optional<std::string> def = {}) const {
    if (auto v = find(s, k)) return v->text;
    if (!def) fail(sections_.count(s) ? sections_.at(s) : 0, "missing key '" + k + "' in [" + s + "]");
    return *def;
  }

  double num(const std::string& s, const std::string& k, std::optional<double> def = {}) const {
    auto v = find(s, k);
    if (!v) {
      if (!def) fail(sections_.count(s) ? sections_.at(s) : 0, "missing key '" + k + "' in [" + s + "]");
      return *def;
    }
    return to_number(v->text, v->line, k);
  }

  std::vector<double> nums(const std::string& s, const std::string& k, std::vector<double> def = {}) const {
    auto v = find(s, k);
    if (!v) return def;
    std::vector<double> out;
    for (auto& item : split(v->text)) out.push_back(to_number(item, v->line, k));
    if (out.empty()) fail(v->line, "'" + k + "' needs at least one value");
    return out;
  }

  std::vector<std::string> words(const std::string& s, const std::string& k, std::vector<std::string> def = {}) const {
    auto v = find(s, k);
    if (!v) return def;
    auto out = split(v->text);
    if (out.empty()) fail(v->line, "'" + k + "' needs at least one value");
    return out;
  }

  // Keys of a section that nobody asked for.
  void reject_unused(const std::set<std::string>& known_sections) const {
    for (auto& [s, line] : sections_)
      if (!known_sections.count(s)) fail(line, "unknown section [" + s + "]");
    for (auto& [s, keys] : values_)
      for (auto& [k, v] : keys)
        if (!used_.count(s + "\x1f" + k)) fail(v.line, "unknown key '" + k + "' in [" + s + "]");
  }

  // All key/value pairs of a section as numbers (subordinator parameters).
  Params numeric_section(const std::string& s, const std::set<std::string>& skip) const {
    Params p;
    auto it = values_.find(s);
    if (it == values_.end()) return p;
    for (auto& [k, v] : it->second) {
      if (skip.count(k)) continue;
      used_.insert(s + "\x1f" + k);
      p[k] = to_number(v.text, v.line, k);
    }
    return p;
  }

  int line_of(const std::string& s, const std::string& k) const {
    auto v = find(s, k);
    return v ? v->line : (sections_.count(s) ? sections_.at(s) : 0);
  }

  [[noreturn]] void fail(int line, const std::string& msg) const {
    std::ostringstream os;
    os << origin_ << ":" << line << ": " << msg;
    throw ConfigError(os.str());
  }

 private:
  static std::string strip_comment(const std::string& s) {
    auto p = s.find_first_of("#;");
    return p == std::string::npos ? s : s.substr(0, p);
  }
  static std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }
  static std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ',')) {
      cur = trim(cur);
      if (!cur.empty()) out.push_back(cur);
    }
    return out;
  }
  double to_number(const std::string& t, int line, const std::string& key) const {
    try {
      std::size_t pos = 0;
      double v = std::stod(t, &pos);
      if (pos != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      fail(line, "'" + key + "' expects a number, got '" + t + "'");
    }
  }

  std::string origin_;
  std::map<std::string, int> sections_;
  std::map<std::string, std::map<std::string, Value>> values_;
  mutable std::set<std::string> used_;
};

enum class Task { classify, green, wave, check };

inline std::string to_string(Task t) {
  switch (t) {
    case Task::classify: return "classify";
    case Task::green: return "green";
    case Task::wave: return "wave";
    case Task::check: return "check";
  }
  return "?";
}

struct RunConfig {
  std::string path;
  // [scenario]
  std::string scenario = "single_node";  // single_node | grid | hardy | trace_hardy
  double killing = 2.0;                  // single_node
  int dim = 3;
  double alpha = 2.0;
  std::optional<double> p;
  double h = 1.0;
  double eps = 0.5;
  std::optional<double> form_scale;
  std::string boundary = "dirichlet";
  std::string profile = "power";  // hardy: power | ground_state
  std::string measure = "none";   // grid: none | uniform | radial | plane
  std::string sign = "minus";     // grid
  int glue_dim = 0;               // grid: second grid glued at the origins
  int glue_n = 0;
  // [subordinator]
  std::string subordinator = "linear";
  Params sub_params;
  // [run]
  std::vector<Task> tasks;
  std::vector<int> sizes{1};
  std::vector<double> couplings{0.0};
  std::string coupling_unit = "absolute";  // absolute | critical | star
  std::string g = "centre";                // centre | ones
  std::uint64_t seed = 20240601;
  int workers = 1;
  int budget = 4000;
  int wave_decades = 4;
  bool export_coo = false;
  std::string output = "out";
  // [tolerances]
  double tol_trichotomy = 1e-9;
  double tol_cauchy = 1e-3;
  double tol_slope = 0.02;
  double tol_growth = 0.2;
  double tol_energy = 1e-10;
  double tol_identity = 1e-6;
  // [sweep]
  std::vector<double> sweep_lambda;
  std::vector<double> sweep_beta;
  std::vector<int> sweep_sizes;

  bool has(Task t) const { return std::find(tasks.begin(), tasks.end(), t) != tasks.end(); }
};

inline RunConfig parse_config(const IniFile& ini, const std::string& path = "<config>") {
  RunConfig c;
  c.path = path;
  const std::string S = "scenario", B = "subordinator", R = "run", T = "tolerances", W = "sweep";
  if (!ini.has_section(S)) ini.fail(0, "missing [scenario] section");
  c.scenario = ini.str(S, "name");
  static const std::set<std::string> scenarios{"single_node", "grid", "hardy", "trace_hardy"};
  if (!scenarios.count(c.scenario)) ini.fail(ini.line_of(S, "name"), "unknown scenario '" + c.scenario + "'");
  c.killing = ini.num(S, "k", 2.0);
  c.dim = static_cast<int>(ini.num(S, "dim", 3));
  c.alpha = ini.num(S, "alpha", 2.0);
  if (ini.has(S, "p")) c.p = ini.num(S, "p");
  c.h = ini.num(S, "h", 1.0);
  c.eps = ini.num(S, "eps", 0.5);
  if (ini.has(S, "form_scale")) c.form_scale = ini.num(S, "form_scale");
  c.boundary = ini.str(S, "boundary", "dirichlet");
  c.profile = ini.str(S, "profile", "power");
  c.measure = ini.str(S, "measure", "none");
  c.sign = ini.str(S, "sign", "minus");
  c.glue_dim = static_cast<int>(ini.num(S, "glue_dim", 0));
  c.glue_n = static_cast<int>(ini.num(S, "glue_n", 0));
  if (c.boundary != "dirichlet" && c.boundary != "free")
    ini.fail(ini.line_of(S, "boundary"), "boundary must be dirichlet or free");
  if (c.profile != "power" && c.profile != "ground_state")
    ini.fail(ini.line_of(S, "profile"), "profile must be power or ground_state");
  if (c.measure != "none" && c.measure != "uniform" && c.measure != "radial" && c.measure != "plane")
    ini.fail(ini.line_of(S, "measure"), "measure must be none, uniform, radial or plane");
  if (c.sign != "minus" && c.sign != "plus") ini.fail(ini.line_of(S, "sign"), "sign must be minus or plus");
  if (!(c.killing > 0.0)) ini.fail(ini.line_of(S, "k"), "k must be > 0");
  if (!(c.h > 0.0)) ini.fail(ini.line_of(S, "h"), "h must be > 0");

  if (ini.has_section(B)) {
    c.subordinator = ini.str(B, "name");
    c.sub_params = ini.numeric_section(B, {"name"});
    try {
      catalog_lookup(c.subordinator, c.sub_params);
    } catch (const std::invalid_argument& e) {
      ini.fail(ini.line_of(B, "name"), e.what());
    }
  }

  auto task_names = ini.words(R, "tasks", {"classify"});
  for (auto& t : task_names) {
    if (t == "classify") c.tasks.push_back(Task::classify);
    else if (t == "green") c.tasks.push_back(Task::green);
    else if (t == "wave") c.tasks.push_back(Task::wave);
    else if (t == "check") c.tasks.push_back(Task::check);
    else ini.fail(ini.line_of(R, "tasks"), "unknown task '" + t + "'");
  }
  auto to_sizes = [&](const std::vector<double>& v, const std::string& sec, const std::string& key) {
    std::vector<int> out;
    for (double x : v) {
      if (x < 1 || x != static_cast<int>(x)) ini.fail(ini.line_of(sec, key), "sizes must be positive integers");
      out.push_back(static_cast<int>(x));
    }
    if (!std::is_sorted(out.begin(), out.end()) || std::adjacent_find(out.begin(), out.end()) != out.end())
      ini.fail(ini.line_of(sec, key), "sizes must be strictly ascending");
    return out;
  };
  c.sizes = to_sizes(ini.nums(R, "sizes", {1.0}), R, "sizes");
  c.couplings = ini.nums(R, "couplings", {0.0});
  for (double l : c.couplings)
    if (!(l >= 0.0)) ini.fail(ini.line_of(R, "couplings"), "couplings must be >= 0");
  c.coupling_unit = ini.str(R, "coupling_unit", "absolute");
  if (c.coupling_unit != "absolute" && c.coupling_unit != "critical" && c.coupling_unit != "star")
    ini.fail(ini.line_of(R, "coupling_unit"), "coupling_unit must be absolute, critical or star");
  if (c.coupling_unit == "star" && c.scenario != "hardy" && c.scenario != "trace_hardy")
    ini.fail(ini.line_of(R, "coupling_unit"), "coupling_unit = star needs a hardy scenario");
  c.g = ini.str(R, "g", "centre");
  if (c.g != "centre" && c.g != "ones") ini.fail(ini.line_of(R, "g"), "g must be centre or ones");
  double seed = ini.num(R, "seed", 20240601.0);
  if (seed < 0 || seed != std::floor(seed)) ini.fail(ini.line_of(R, "seed"), "seed must be a nonnegative integer");
  c.seed = static_cast<std::uint64_t>(seed);
  c.workers = static_cast<int>(ini.num(R, "workers", 1));
  if (c.workers < 1) ini.fail(ini.line_of(R, "workers"), "workers must be >= 1");
  c.budget = static_cast<int>(ini.num(R, "budget", 4000));
  c.wave_decades = static_cast<int>(ini.num(R, "wave_decades", 4));
  if (c.wave_decades < 3) ini.fail(ini.line_of(R, "wave_decades"), "wave_decades must be >= 3");
  c.export_coo = ini.str(R, "export_coo", "false") == "true";
  c.output = ini.str(R, "output", "out");

  auto positive = [&](const std::string& key, double& slot) {
    slot = ini.num(T, key, slot);
    if (!(slot > 0.0)) ini.fail(ini.line_of(T, key), "tolerance '" + key + "' must be > 0");
  };
  positive("trichotomy", c.tol_trichotomy);
  positive("cauchy", c.tol_cauchy);
  positive("slope", c.tol_slope);
  positive("growth", c.tol_growth);
  positive("energy", c.tol_energy);
  positive("identity", c.tol_identity);

  c.sweep_lambda = ini.nums(W, "lambda");
  c.sweep_beta = ini.nums(W, "beta");
  for (double b : c.sweep_beta)
    if (!(b > 0.0 && b < 2.0)) ini.fail(ini.line_of(W, "beta"), "beta values must lie in (0,2)");
  if (ini.has(W, "sizes")) c.sweep_sizes = to_sizes(ini.nums(W, "sizes"), W, "sizes");

  ini.reject_unused({S, B, R, T, W});
  return c;
}

inline RunConfig load_config(const std::string& path) { return parse_config(IniFile::load(path), path); }

}  // namespace sublab
