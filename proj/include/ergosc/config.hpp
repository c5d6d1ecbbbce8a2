#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "kernels.hpp"
#include "norms.hpp"
#include "rng.hpp"
#include "systems.hpp"

namespace ergosc {

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

inline double parse_real(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  require(!t.empty() && end == t.c_str() + t.size(), ErrorKind::ParseError, what + ": '" + t + "' is not a number");
  return v;
}

inline std::int64_t parse_integer(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  require(!t.empty() && end == t.c_str() + t.size(), ErrorKind::ParseError, what + ": '" + t + "' is not an integer");
  return v;
}

inline bool parse_bool(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  fail(ErrorKind::ParseError, what + ": '" + t + "' is not a boolean");
}

/// "name(args)" -> {name, args}; no parentheses -> {text, ""}.
inline std::pair<std::string, std::string> call_form(const std::string& text) {
  const std::string t = trim(text);
  const auto open = t.find('(');
  if (open == std::string::npos) return {t, ""};
  require(t.back() == ')', ErrorKind::ParseError, "unbalanced parentheses in '" + t + "'");
  return {trim(t.substr(0, open)), t.substr(open + 1, t.size() - open - 2)};
}

/// Splits on commas at parenthesis depth zero.
inline std::vector<std::string> split_args(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    require(depth >= 0, ErrorKind::ParseError, "unbalanced parentheses in '" + s + "'");
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  require(depth == 0, ErrorKind::ParseError, "unbalanced parentheses in '" + s + "'");
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

}  // namespace detail

/// Kernel by name: bump(w), plateau(M), hilbert(M), dilate(<kernel>, xi).
inline KernelSpec parse_kernel(const std::string& text) {
  const auto [name, argtext] = detail::call_form(text);
  const auto args = detail::split_args(argtext);
  auto want = [&](std::size_t n) {
    require(args.size() == n, ErrorKind::ParseError,
            "kernel " + name + " takes " + std::to_string(n) + " argument(s), got " + std::to_string(args.size()));
  };
  try {
    if (name == "bump") {
      want(1);
      return bump_kernel(detail::parse_real(args[0], "bump width"));
    }
    if (name == "plateau") {
      want(1);
      return plateau_kernel(static_cast<int>(detail::parse_integer(args[0], "plateau M")));
    }
    if (name == "hilbert") {
      want(1);
      return hilbert_kernel(static_cast<int>(detail::parse_integer(args[0], "hilbert M")));
    }
    if (name == "dilate") {
      want(2);
      return dilate(parse_kernel(args[0]), detail::parse_real(args[1], "dilation factor"));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::BadParameter) fail(ErrorKind::ConfigInvalid, std::string("kernel '") + text + "': " + e.what());
    throw;
  }
  fail(ErrorKind::ConfigInvalid, "unknown kernel '" + name + "'");
}

/// Point bijection from shift(s), cycles (a b c)(d e), array p0 p1 ..., or a bare list.
inline std::vector<std::size_t> parse_permutation(const std::string& text, std::size_t n) {
  const std::string t = detail::trim(text);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  if (t.rfind("shift", 0) == 0) {
    const auto [name, arg] = detail::call_form(t);
    const auto s = detail::parse_integer(arg, "shift");
    const auto nn = static_cast<std::int64_t>(n);
    for (std::int64_t x = 0; x < nn; ++x) perm[static_cast<std::size_t>(x)] = static_cast<std::size_t>(((x + s) % nn + nn) % nn);
    return perm;
  }
  if (t.rfind("cycles", 0) == 0) {
    std::string rest = t.substr(6);
    std::size_t pos = 0;
    while ((pos = rest.find('(', pos)) != std::string::npos) {
      const auto close = rest.find(')', pos);
      require(close != std::string::npos, ErrorKind::ParseError, "unterminated cycle in '" + t + "'");
      std::vector<std::size_t> cyc;
      for (const auto& w : detail::split_words(rest.substr(pos + 1, close - pos - 1))) {
        const auto v = detail::parse_integer(w, "cycle entry");
        require(v >= 0 && static_cast<std::size_t>(v) < n, ErrorKind::ConfigInvalid, "cycle entry " + w + " out of range");
        cyc.push_back(static_cast<std::size_t>(v));
      }
      for (std::size_t i = 0; i < cyc.size(); ++i) perm[cyc[i]] = cyc[(i + 1) % cyc.size()];
      pos = close + 1;
    }
    return perm;
  }
  std::string list = t.rfind("array", 0) == 0 ? t.substr(5) : t;
  const auto words = detail::split_words(list);
  require(words.size() == n, ErrorKind::ConfigInvalid,
          "permutation lists " + std::to_string(words.size()) + " images for " + std::to_string(n) + " points");
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = detail::parse_integer(words[i], "permutation entry");
    require(v >= 0 && static_cast<std::size_t>(v) < n, ErrorKind::ConfigInvalid, "permutation entry " + words[i] + " out of range");
    perm[i] = static_cast<std::size_t>(v);
  }
  return perm;
}

struct SystemSpec {
  /// rotation | random | identity | explicit on finite spaces; circle (translation flow sampled on
  /// `points` midpoint nodes); integers (the shift on Z, for sequence-only experiments)
  std::string kind = "rotation";
  std::size_t points = 0;
  std::int64_t step = 1;
  std::vector<double> weights;
  std::vector<std::size_t> permutation;
  /// Multiplier phases in turns (h = e^{2 pi i phase}).
  std::vector<double> phases;
  std::size_t weight_classes = 3;
  bool random_phases = true;
  /// Flow speed for kind = circle.
  double rate = 1.0;

  bool finite() const { return kind != "circle" && kind != "integers"; }
};

inline FactoredIsometry build_system(const SystemSpec& s, CounterRng& rng) {
  require(s.finite(), ErrorKind::ConfigInvalid, "system kind '" + s.kind + "' is not a finite measure space");
  if (s.kind == "rotation") return rotation(s.points, s.step);
  if (s.kind == "identity") return identity_isometry(WeightedSpace::counting(s.points));
  if (s.kind == "random") return random_isometry(rng, s.points, {s.weight_classes, s.random_phases});
  std::vector<cplx> h(s.points, cplx{1.0, 0.0});
  for (std::size_t i = 0; i < s.phases.size(); ++i) h[i] = std::polar(1.0, 2.0 * std::numbers::pi * s.phases[i]);
  return make_isometry(WeightedSpace(s.weights), std::move(h), s.permutation);
}

enum class BreakpointScheme { dyadic, arithmetic, random };

struct BreakpointSpec {
  BreakpointScheme scheme = BreakpointScheme::dyadic;
  std::uint64_t seed = 0;
  std::int64_t start = 1;
  std::int64_t step = 1;
  /// R values to run; a single entry for experiments with one breakpoint set.
  std::vector<std::size_t> counts{8};
};

/// u_1 < ... < u_R under the scheme: start 2^i, start + i step, or R distinct draws from
/// [start, start + 4R) for random(seed).
inline std::vector<std::int64_t> make_breakpoints(const BreakpointSpec& b, std::size_t R) {
  std::vector<std::int64_t> u;
  switch (b.scheme) {
    case BreakpointScheme::dyadic:
      for (std::size_t i = 0; i < R; ++i) u.push_back(b.start << i);
      break;
    case BreakpointScheme::arithmetic:
      for (std::size_t i = 0; i < R; ++i) u.push_back(b.start + static_cast<std::int64_t>(i) * b.step);
      break;
    case BreakpointScheme::random: {
      CounterRng rng(b.seed, R);
      std::vector<std::int64_t> pool;
      for (std::int64_t n = 0; n < static_cast<std::int64_t>(4 * R); ++n) pool.push_back(b.start + n);
      rng.shuffle(pool);
      u.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(R));
      std::sort(u.begin(), u.end());
      break;
    }
  }
  return u;
}

inline std::string to_string(const BreakpointSpec& b) {
  switch (b.scheme) {
    case BreakpointScheme::dyadic: return "dyadic";
    case BreakpointScheme::arithmetic: return "arithmetic";
    case BreakpointScheme::random: return "random(" + std::to_string(b.seed) + ")";
  }
  return "?";
}

using ConfigSections = std::map<std::string, std::map<std::string, std::string>>;

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  SystemSpec system;
  std::string kernel_text;
  double p1 = 2.0, p2 = 2.0, p3 = 1.0;
  BreakpointSpec breakpoints;
  std::vector<double> ladder;
  std::map<std::string, double> tolerances;
  std::map<std::string, std::int64_t> trials;
  /// Every section and key as written, for experiment-specific parameters and hashing.
  ConfigSections raw;

  double tolerance(const std::string& key, double fallback) const {
    auto it = tolerances.find(key);
    return it == tolerances.end() ? fallback : it->second;
  }

  std::int64_t trial_count(const std::string& key, std::int64_t fallback) const {
    auto it = trials.find(key);
    return it == trials.end() ? fallback : it->second;
  }

  std::optional<std::string> param(const std::string& section, const std::string& key) const {
    auto s = raw.find(section);
    if (s == raw.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
  }

  double real_param(const std::string& key, double fallback) const {
    auto v = param("params", key);
    return v ? detail::parse_real(*v, key) : fallback;
  }

  std::int64_t int_param(const std::string& key, std::int64_t fallback) const {
    auto v = param("params", key);
    return v ? detail::parse_integer(*v, key) : fallback;
  }

  /// Sorted "[section]\nkey = value\n" text with the effective name and seed; the input to the fingerprint.
  std::string canonical() const {
    ConfigSections c = raw;
    c["experiment"]["name"] = experiment;
    c["experiment"]["seed"] = std::to_string(seed);
    std::string out;
    for (const auto& [sec, kv] : c) {
      out += "[" + sec + "]\n";
      for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    }
    return out;
  }
};

/// Splits `[section]` / `key = value` text; '#' starts a comment.
inline ConfigSections parse_sections(const std::string& text) {
  ConfigSections out;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    if (t.front() == '[') {
      require(t.back() == ']' && t.size() > 2, ErrorKind::ParseError, where + ": malformed section header");
      section = detail::trim(t.substr(1, t.size() - 2));
      out[section];
      continue;
    }
    const auto eq = t.find('=');
    require(eq != std::string::npos, ErrorKind::ParseError, where + ": expected 'key = value'");
    require(!section.empty(), ErrorKind::ParseError, where + ": key outside of any section");
    const std::string key = detail::trim(t.substr(0, eq)), value = detail::trim(t.substr(eq + 1));
    require(!key.empty(), ErrorKind::ParseError, where + ": empty key");
    require(!out[section].count(key), ErrorKind::ParseError, where + ": duplicate key '" + key + "'");
    out[section][key] = value;
  }
  return out;
}

inline SystemSpec parse_system(const std::map<std::string, std::string>& kv) {
  SystemSpec s;
  auto get = [&](const std::string& k) -> std::optional<std::string> {
    auto it = kv.find(k);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  s.kind = get("kind").value_or("rotation");
  if (auto w = get("weights")) {
    for (const auto& x : detail::split_words(*w)) s.weights.push_back(detail::parse_real(x, "weight"));
    s.points = s.weights.size();
  }
  if (auto p = get("points")) {
    const auto n = detail::parse_integer(*p, "points");
    require(n > 0, ErrorKind::ConfigInvalid, "system needs points > 0");
    require(s.weights.empty() || static_cast<std::size_t>(n) == s.weights.size(), ErrorKind::ConfigInvalid,
            "points disagrees with the weight list");
    s.points = static_cast<std::size_t>(n);
  }
  require(s.points > 0 || s.kind == "integers", ErrorKind::ConfigInvalid, "system needs a point count or weight list");
  if (auto r = get("rate")) s.rate = detail::parse_real(*r, "rate");
  if (auto st = get("step")) s.step = detail::parse_integer(*st, "step");
  if (auto c = get("weight_classes")) s.weight_classes = static_cast<std::size_t>(detail::parse_integer(*c, "weight_classes"));
  if (auto r = get("random_phases")) s.random_phases = detail::parse_bool(*r, "random_phases");
  if (s.kind == "explicit") {
    if (s.weights.empty()) s.weights.assign(s.points, 1.0);
    s.permutation = parse_permutation(get("permutation").value_or("shift(0)"), s.points);
    if (auto ph = get("phases")) {
      for (const auto& x : detail::split_words(*ph)) s.phases.push_back(detail::parse_real(x, "phase"));
      require(s.phases.size() == s.points, ErrorKind::ConfigInvalid, "phase list length differs from point count");
    }
    try {
      CounterRng unused(0);
      build_system(s, unused);
    } catch (const Error& e) {
      fail(ErrorKind::ConfigInvalid, std::string("system: ") + e.what());
    }
  } else {
    require(s.kind == "rotation" || s.kind == "random" || s.kind == "identity" || s.kind == "circle" ||
                s.kind == "integers",
            ErrorKind::ConfigInvalid,
            "unknown system kind '" + s.kind + "'");
    require(!get("permutation"), ErrorKind::ConfigInvalid, "permutation is only read for kind = explicit");
  }
  return s;
}

inline BreakpointSpec parse_breakpoints(const std::map<std::string, std::string>& kv) {
  BreakpointSpec b;
  if (auto it = kv.find("scheme"); it != kv.end()) {
    const auto [name, arg] = detail::call_form(it->second);
    if (name == "dyadic")
      b.scheme = BreakpointScheme::dyadic;
    else if (name == "arithmetic")
      b.scheme = BreakpointScheme::arithmetic;
    else if (name == "random") {
      b.scheme = BreakpointScheme::random;
      b.seed = static_cast<std::uint64_t>(detail::parse_integer(arg, "random breakpoint seed"));
    } else
      fail(ErrorKind::ConfigInvalid, "unknown breakpoint scheme '" + name + "'");
  }
  if (auto it = kv.find("start"); it != kv.end()) b.start = detail::parse_integer(it->second, "start");
  if (auto it = kv.find("step"); it != kv.end()) b.step = detail::parse_integer(it->second, "step");
  if (auto it = kv.find("count"); it != kv.end()) {
    b.counts.clear();
    for (const auto& w : detail::split_words(it->second)) b.counts.push_back(static_cast<std::size_t>(detail::parse_integer(w, "count")));
  }
  require(b.start >= 1 && b.step >= 1, ErrorKind::ConfigInvalid, "breakpoints need start >= 1 and step >= 1");
  for (auto R : b.counts) require(R >= 2, ErrorKind::ConfigInvalid, "breakpoint count must be >= 2");
  require(!b.counts.empty(), ErrorKind::ConfigInvalid, "breakpoint count list is empty");
  return b;
}

/// Parses and validates config text. `experiment_override` and `seed_override` replace the file values.
inline ExperimentConfig parse_config(const std::string& text, const std::optional<std::string>& experiment_override = {},
                                     const std::optional<std::uint64_t>& seed_override = {}) {
  ExperimentConfig cfg;
  cfg.raw = parse_sections(text);
  require(!cfg.raw.empty(), ErrorKind::ConfigInvalid, "empty config");
  require(cfg.raw.count("system"), ErrorKind::ParseError, "missing [system] section");
  const auto& exp = cfg.raw["experiment"];
  if (auto it = exp.find("name"); it != exp.end()) cfg.experiment = it->second;
  if (auto it = exp.find("seed"); it != exp.end()) cfg.seed = static_cast<std::uint64_t>(detail::parse_integer(it->second, "seed"));
  if (experiment_override) cfg.experiment = *experiment_override;
  if (seed_override) cfg.seed = *seed_override;
  require(!cfg.experiment.empty(), ErrorKind::ConfigInvalid, "no experiment name in [experiment] and none given");

  cfg.system = parse_system(cfg.raw["system"]);
  if (auto k = cfg.param("kernel", "spec")) {
    cfg.kernel_text = *k;
    parse_kernel(cfg.kernel_text);
  }

  if (auto v = cfg.param("exponents", "p1")) cfg.p1 = detail::parse_real(*v, "p1");
  if (auto v = cfg.param("exponents", "p2")) cfg.p2 = detail::parse_real(*v, "p2");
  try {
    cfg.p3 = holder_exponent(cfg.p1, cfg.p2);
  } catch (const Error& e) {
    fail(ErrorKind::ConfigInvalid, std::string("exponent gate (1 < p1, p2 < inf and 1/p1 + 1/p2 < 3/2) failed: ") + e.what());
  }

  if (cfg.raw.count("breakpoints")) cfg.breakpoints = parse_breakpoints(cfg.raw["breakpoints"]);
  if (auto v = cfg.param("ladder", "values")) {
    for (const auto& w : detail::split_words(*v)) cfg.ladder.push_back(detail::parse_real(w, "ladder value"));
    for (std::size_t i = 1; i < cfg.ladder.size(); ++i)
      require(cfg.ladder[i] > cfg.ladder[i - 1], ErrorKind::ConfigInvalid, "ladder must be strictly increasing");
  }
  for (const auto& [k, v] : cfg.raw["tolerances"]) {
    const double t = detail::parse_real(v, "tolerance " + k);
    require(t > 0.0 && std::isfinite(t), ErrorKind::ConfigInvalid, "tolerance " + k + " must be > 0");
    cfg.tolerances[k] = t;
  }
  for (const auto& [k, v] : cfg.raw["trials"]) {
    const auto n = detail::parse_integer(v, "trial count " + k);
    require(n >= 1, ErrorKind::ConfigInvalid, "trial count " + k + " must be >= 1");
    cfg.trials[k] = n;
  }
  // Drop sections that were only created by lookups.
  for (auto it = cfg.raw.begin(); it != cfg.raw.end();)
    it = it->second.empty() ? cfg.raw.erase(it) : std::next(it);
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path, const std::optional<std::string>& experiment_override = {},
                                    const std::optional<std::uint64_t>& seed_override = {}) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::IoFailure, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), experiment_override, seed_override);
}

}  // namespace ergosc
