// Sectioned key-value config: a strict TOML subset.
//
// Grammar (documented in the README):
//   [section]
//   key = value          # comment
// Values: integers, floats, booleans (true/false), quoted strings, and flat
// arrays [v1, v2, ...].  Unknown sections or keys are rejected with their
// line number; duplicate sections or keys are errors.
#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pqec/errors.hpp"
#include "pqec/lindblad.hpp"
#include "pqec/resource.hpp"
#include "pqec/sim.hpp"
#include "pqec/surface_code.hpp"

namespace pqec {

class Config {
 public:
  struct Entry {
    std::string raw;                   // scalar token or quoted string content
    bool is_string = false;
    bool is_array = false;
    std::vector<std::string> items;    // array tokens
    int line = 0;
    mutable bool used = false;
  };

  static Config parse(const std::string& text, const std::string& origin = "<config>") {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string stripped = strip_comment(line, lineno, origin);
      const std::string trimmed = trim(stripped);
      if (trimmed.empty()) continue;
      if (trimmed.front() == '[') {
        if (trimmed.back() != ']')
          throw config_error(origin + ":" + std::to_string(lineno) + ": malformed section header");
        section = trim(trimmed.substr(1, trimmed.size() - 2));
        if (section.empty())
          throw config_error(origin + ":" + std::to_string(lineno) + ": empty section name");
        if (cfg.sections_.count(section))
          throw config_error(origin + ":" + std::to_string(lineno) + ": duplicate section [" +
                             section + "]");
        cfg.sections_[section];
        cfg.section_lines_[section] = lineno;
        continue;
      }
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw config_error(origin + ":" + std::to_string(lineno) + ": expected key = value");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty())
        throw config_error(origin + ":" + std::to_string(lineno) + ": empty key");
      if (section.empty())
        throw config_error(origin + ":" + std::to_string(lineno) + ": key outside any section");
      if (cfg.sections_[section].count(key))
        throw config_error(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                           "' in [" + section + "]");
      cfg.sections_[section][key] = parse_value(value, lineno, origin);
    }
    return cfg;
  }

  // "section.key=value", applied after file parse and before validation
  void apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
      throw config_error("override must be section.key=value: " + assignment);
    const std::string path = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    const auto dot = path.find('.');
    if (dot == std::string::npos)
      throw config_error("override key must be section.key: " + path);
    const std::string section = path.substr(0, dot);
    const std::string key = path.substr(dot + 1);
    sections_[section][key] = parse_value(value, 0, "<override>");
  }

  bool has_section(const std::string& section) const { return sections_.count(section) > 0; }

  void require_section(const std::string& section, const std::string& why) const {
    if (!has_section(section))
      throw config_error(origin_ + ": missing section [" + section + "] required by " + why);
  }

  bool has_key(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
  }

  // typed getters; every successful read marks the entry as consumed
  double get_double(const std::string& section, const std::string& key, double fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    return to_double(*e, section, key);
  }
  double get_double_required(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) throw missing(section, key);
    return to_double(*e, section, key);
  }
  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    return to_int(*e, section, key);
  }
  std::uint64_t get_uint(const std::string& section, const std::string& key,
                         std::uint64_t fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    const std::int64_t v = to_int(*e, section, key);
    if (v < 0) throw config_error(where(*e, section, key) + ": must be non-negative");
    return static_cast<std::uint64_t>(v);
  }
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    e->used = true;
    if (e->raw == "true") return true;
    if (e->raw == "false") return false;
    throw config_error(where(*e, section, key) + ": expected true or false");
  }
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    e->used = true;
    return e->raw;
  }
  std::vector<double> get_double_array(const std::string& section, const std::string& key,
                                       std::vector<double> fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    e->used = true;
    if (!e->is_array) throw config_error(where(*e, section, key) + ": expected an array");
    std::vector<double> out;
    for (const std::string& tok : e->items) out.push_back(parse_double_token(tok, *e, section, key));
    return out;
  }

  // strict-parsing backstop: every key must have been consumed by a getter
  void reject_unknown_keys() const {
    for (const auto& [section, entries] : sections_) {
      if (entries.empty() && !section_used_.count(section))
        throw config_error(origin_ + ":" + std::to_string(section_lines_.at(section)) +
                           ": unknown section [" + section + "]");
      for (const auto& [key, entry] : entries)
        if (!entry.used)
          throw config_error(origin_ + ":" + std::to_string(entry.line) + ": unknown key '" +
                             key + "' in [" + section + "]");
    }
  }

  void mark_section_known(const std::string& section) const { section_used_.insert(section); }

  // resolved config echo for manifests
  nlohmann::json to_json() const {
    nlohmann::json j;
    for (const auto& [section, entries] : sections_) {
      nlohmann::json s;
      for (const auto& [key, e] : entries) {
        if (e.is_array) {
          nlohmann::json arr = nlohmann::json::array();
          for (const auto& tok : e.items) arr.push_back(token_to_json(tok));
          s[key] = arr;
        } else if (e.is_string) {
          s[key] = e.raw;
        } else {
          s[key] = token_to_json(e.raw);
        }
      }
      j[section] = s;
    }
    return j;
  }

 private:
  static std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
  }

  static std::string strip_comment(const std::string& line, int lineno,
                                   const std::string& origin) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    if (in_string)
      throw config_error(origin + ":" + std::to_string(lineno) + ": unterminated string");
    return line;
  }

  static Entry parse_value(const std::string& value, int lineno, const std::string& origin) {
    Entry e;
    e.line = lineno;
    if (value.empty()) throw config_error(origin + ":" + std::to_string(lineno) + ": empty value");
    if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"')
        throw config_error(origin + ":" + std::to_string(lineno) + ": unterminated string");
      e.raw = value.substr(1, value.size() - 2);
      e.is_string = true;
      return e;
    }
    if (value.front() == '[') {
      if (value.back() != ']')
        throw config_error(origin + ":" + std::to_string(lineno) + ": unterminated array");
      e.is_array = true;
      std::string body = value.substr(1, value.size() - 2);
      std::string tok;
      std::istringstream items(body);
      while (std::getline(items, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) e.items.push_back(tok);
      }
      return e;
    }
    e.raw = value;
    return e;
  }

  const Entry* find(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    section_used_.insert(section);
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
  }

  config_error missing(const std::string& section, const std::string& key) const {
    return config_error(origin_ + ": missing required key '" + key + "' in [" + section + "]");
  }

  std::string where(const Entry& e, const std::string& section, const std::string& key) const {
    return origin_ + ":" + std::to_string(e.line) + ": [" + section + "]." + key;
  }

  double to_double(const Entry& e, const std::string& section, const std::string& key) const {
    e.used = true;
    if (e.is_array || e.is_string)
      throw config_error(where(e, section, key) + ": expected a number");
    return parse_double_token(e.raw, e, section, key);
  }

  std::int64_t to_int(const Entry& e, const std::string& section, const std::string& key) const {
    e.used = true;
    if (e.is_array || e.is_string)
      throw config_error(where(e, section, key) + ": expected an integer");
    try {
      std::size_t pos = 0;
      const std::int64_t v = std::stoll(e.raw, &pos);
      if (pos != e.raw.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw config_error(where(e, section, key) + ": not an integer: " + e.raw);
    }
  }

  double parse_double_token(const std::string& tok, const Entry& e, const std::string& section,
                            const std::string& key) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw config_error(where(e, section, key) + ": not a number: " + tok);
    }
  }

  static nlohmann::json token_to_json(const std::string& tok) {
    if (tok == "true") return true;
    if (tok == "false") return false;
    try {
      std::size_t pos = 0;
      const std::int64_t v = std::stoll(tok, &pos);
      if (pos == tok.size()) return v;
    } catch (const std::exception&) {
    }
    try {
      std::size_t pos = 0;
      const double v = std::stod(tok, &pos);
      if (pos == tok.size()) return v;
    } catch (const std::exception&) {
    }
    return tok;
  }

  std::string origin_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::map<std::string, int> section_lines_;
  mutable std::set<std::string> section_used_;
};

// ---------------------------------------------------------------------------
// config -> study specs

struct StudyHeader {
  std::string kind;
  std::string label = "run";
  std::uint64_t seed = 1;
};

inline StudyHeader read_study_header(const Config& cfg) {
  cfg.require_section("study", "every study");
  StudyHeader h;
  h.kind = cfg.get_string("study", "kind", "");
  if (h.kind.empty()) throw config_error("missing [study].kind");
  h.label = cfg.get_string("study", "label", "run");
  h.seed = cfg.get_uint("study", "seed", 1);
  return h;
}

inline NoiseModel read_noise(const Config& cfg) {
  cfg.require_section("noise", "this study");
  NoiseModel n;
  const std::string kind = cfg.get_string("noise", "kind", "dephasing_only");
  if (kind == "depolarizing") n.kind = NoiseKind::depolarizing;
  else if (kind == "independent_xz") n.kind = NoiseKind::independent_xz;
  else if (kind == "dephasing_only") n.kind = NoiseKind::dephasing_only;
  else throw config_error("[noise].kind: unknown value '" + kind + "'");
  n.p_phys = cfg.get_double_required("noise", "p_phys");
  n.mismatch_factor = cfg.get_double("noise", "mismatch_factor", 1.0);
  n.validate();
  return n;
}

inline ScalingAnsatz read_ansatz(const Config& cfg, const ScalingAnsatz& fallback) {
  if (!cfg.has_section("ansatz")) return fallback;
  cfg.mark_section_known("ansatz");
  ScalingAnsatz s;
  s.prefactor = cfg.get_double("ansatz", "A", fallback.prefactor);
  s.p_phys = cfg.get_double("ansatz", "p_phys", fallback.p_phys);
  s.p_th = cfg.get_double("ansatz", "p_th", fallback.p_th);
  s.multiplicity = cfg.get_double("ansatz", "C", fallback.multiplicity);
  s.validate();
  return s;
}

struct ExtractSpec {
  int distance = 3;
  NoiseModel noise;
  EstimationMethod method;
  std::string policies = "baseline";  // baseline | frames
};

inline ExtractSpec read_extract_spec(const Config& cfg, std::uint64_t seed) {
  ExtractSpec spec;
  cfg.require_section("code", "extract");
  spec.distance = static_cast<int>(cfg.get_int("code", "distance", 3));
  spec.noise = read_noise(cfg);
  cfg.require_section("extract", "extract");
  const std::string method = cfg.get_string("extract", "method", "exact");
  if (method == "exact") {
    spec.method = EstimationMethod::exact();
  } else if (method == "monte_carlo") {
    const std::uint64_t samples = cfg.get_uint("extract", "samples", 1000000);
    spec.method = EstimationMethod::monte_carlo(samples, seed);
  } else {
    throw config_error("[extract].method: unknown value '" + method + "'");
  }
  spec.policies = cfg.get_string("extract", "policies", "baseline");
  if (spec.policies != "baseline" && spec.policies != "frames")
    throw config_error("[extract].policies must be baseline or frames");
  return spec;
}

inline FitStudySpec read_fit_spec(const Config& cfg, std::uint64_t seed) {
  FitStudySpec spec;
  spec.seed = seed;
  spec.noise = read_noise(cfg);
  cfg.require_section("code", "fit");
  spec.distance_a = static_cast<int>(cfg.get_int("code", "distance", 3));
  if (cfg.has_section("fit")) {
    cfg.mark_section_known("fit");
    spec.gamma_tau_grid = cfg.get_double_array("fit", "gamma_tau", {});
    spec.mismatch_grid = cfg.get_double_array("fit", "mismatch", {});
    spec.distance_b = static_cast<int>(cfg.get_int("fit", "distance_b", 7));
  }
  spec.strategyB_ansatz = read_ansatz(cfg, spec.strategyB_ansatz);
  spec.fill_defaults();
  return spec;
}

inline DynamicsSpec read_dynamics_spec(const Config& cfg, std::uint64_t seed) {
  DynamicsSpec spec;
  spec.seed = seed;
  if (cfg.has_section("exciton")) {
    cfg.mark_section_known("exciton");
    spec.params.eps1 = cfg.get_double("exciton", "eps1", spec.params.eps1);
    spec.params.eps2 = cfg.get_double("exciton", "eps2", spec.params.eps2);
    spec.params.hop = cfg.get_double("exciton", "J", spec.params.hop);
    spec.params.gamma1 = cfg.get_double("exciton", "gamma1", spec.params.gamma1);
    spec.params.gamma2 = cfg.get_double("exciton", "gamma2", spec.params.gamma2);
    spec.params.gamma12 = cfg.get_double("exciton", "gamma12", spec.params.gamma12);
    spec.params.kappa1 = cfg.get_double("exciton", "kappa1", spec.params.kappa1);
    spec.params.kappa2 = cfg.get_double("exciton", "kappa2", spec.params.kappa2);
  }
  cfg.require_section("dynamics", "dynamics");
  spec.tau = cfg.get_double("dynamics", "tau", spec.tau);
  spec.steps = static_cast<int>(cfg.get_int("dynamics", "steps", spec.steps));
  spec.dephasing_mismatch =
      cfg.get_double("dynamics", "dephasing_mismatch", spec.dephasing_mismatch);
  spec.dwell_grid = cfg.get_double_array("dynamics", "dwell_grid", spec.dwell_grid);
  spec.distance_b = static_cast<int>(cfg.get_int("dynamics", "distance_b", spec.distance_b));
  spec.strategyB_ansatz = read_ansatz(cfg, spec.strategyB_ansatz);
  spec.validate();
  return spec;
}

inline ResourceStudySpec read_resource_spec(const Config& cfg) {
  ResourceStudySpec spec;
  spec.ansatz = read_ansatz(cfg, spec.ansatz);
  cfg.require_section("resources", "resources");
  spec.n_logical = static_cast<int>(cfg.get_int("resources", "n_logical", spec.n_logical));
  spec.zeta = cfg.get_double("resources", "zeta", spec.zeta);
  spec.delta_tar_grid = cfg.get_double_array("resources", "delta_tar", spec.delta_tar_grid);
  spec.eps_over_m_grid = cfg.get_double_array("resources", "eps_over_m", spec.eps_over_m_grid);
  return spec;
}

}  // namespace pqec
