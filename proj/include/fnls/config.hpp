#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "fnls/errors.hpp"
#include "fnls/grid.hpp"
#include "fnls/ground_state.hpp"
#include "fnls/model.hpp"
#include "fnls/riesz.hpp"

namespace fnls {

struct SolverConfig {
  /// 0 selects the grid heuristic.
  double tau = 0.0;
  double tol = 1e-8;
  std::size_t max_iters = 200000;
};

struct EvolutionConfig {
  double T = 10.0;
  /// 0 selects the grid heuristic.
  double dt = 0.0;
  std::size_t record_stride = 10;
};

/// Everything needed to reproduce a run. Text form: flat `key = value` lines, `#` comments.
///
/// Required keys: dimension, s, beta, lambda, c2, n, L. `n` and `L` take one value (cube) or
/// one per axis, comma separated.
struct RunConfig {
  PhysicsParams physics;
  NonlinearitySpec nonlinearity;
  std::vector<std::size_t> n;
  std::vector<double> L;
  KernelRule kernel = KernelRule::Spectral;
  SolverConfig solver;
  EvolutionConfig evolution;
  std::uint64_t seed = 1;
  AdmissibilityReport admissibility;

  Grid grid() const {
    const auto rank = static_cast<std::size_t>(physics.dimension);
    auto expand = [rank](const auto& v) {
      auto out = v;
      if (out.size() == 1) out.assign(rank, v.front());
      return out;
    };
    return Grid(expand(n), expand(L));
  }

  SolverOptions solver_options() const {
    SolverOptions o;
    o.step = solver.tau;
    o.tol = solver.tol;
    o.max_iters = solver.max_iters;
    return o;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view text, std::string_view key, std::size_t line) {
  T v{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end)
    throw ParseError("line " + std::to_string(line) + ": cannot parse value '" + std::string(text) + "' for key '" +
                     std::string(key) + "'");
  return v;
}

template <typename T>
std::vector<T> parse_list(std::string_view text, std::string_view key, std::size_t line) {
  std::vector<T> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_number<T>(trim(text.substr(start, comma - start)), key, line));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{"dimension", "s",       "beta",     "lambda",        "c2",
                                             "cmu",       "mu",      "n",        "L",             "kernel",
                                             "tau",       "tol",     "max_iters", "T",            "dt",
                                             "record_stride", "seed"};
  return keys;
}

inline RunConfig parse_config(std::string_view text) {
  std::map<std::string, std::pair<std::string, std::size_t>> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    const auto& known = config_keys();
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ParseError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (const auto it = entries.find(key); it != entries.end())
      throw ParseError("duplicate key '" + key + "' on lines " + std::to_string(it->second.second) + " and " +
                       std::to_string(line_no));
    entries.emplace(key, std::pair{value, line_no});
  }

  for (const char* req : {"dimension", "s", "beta", "lambda", "c2", "n", "L"})
    if (!entries.count(req)) throw ParseError(std::string("missing required key '") + req + "'");

  RunConfig c;
  auto num = [&](const char* key, auto& target) {
    const auto it = entries.find(key);
    if (it == entries.end()) return;
    using T = std::remove_reference_t<decltype(target)>;
    target = detail::parse_number<T>(it->second.first, key, it->second.second);
  };
  num("dimension", c.physics.dimension);
  num("s", c.physics.s);
  num("beta", c.physics.beta);
  num("lambda", c.physics.lambda);
  num("c2", c.nonlinearity.c2);
  num("cmu", c.nonlinearity.cmu);
  num("mu", c.nonlinearity.mu);
  num("tau", c.solver.tau);
  num("tol", c.solver.tol);
  num("max_iters", c.solver.max_iters);
  num("T", c.evolution.T);
  num("dt", c.evolution.dt);
  num("record_stride", c.evolution.record_stride);
  num("seed", c.seed);
  const auto& [ntext, nline] = entries.at("n");
  c.n = detail::parse_list<std::size_t>(ntext, "n", nline);
  const auto& [ltext, lline] = entries.at("L");
  c.L = detail::parse_list<double>(ltext, "L", lline);
  if (const auto it = entries.find("kernel"); it != entries.end()) {
    if (it->second.first == "spectral")
      c.kernel = KernelRule::Spectral;
    else if (it->second.first == "cell-average")
      c.kernel = KernelRule::CellAverage;
    else
      throw ParseError("line " + std::to_string(it->second.second) + ": kernel must be 'spectral' or 'cell-average'");
  }

  if (c.physics.dimension < 1 || c.physics.dimension > 3)
    throw ParseError("line " + std::to_string(entries.at("dimension").second) + ": dimension must be 1, 2 or 3");
  const auto rank = static_cast<std::size_t>(c.physics.dimension);
  if (c.n.size() != 1 && c.n.size() != rank)
    throw ParseError("line " + std::to_string(nline) + ": n needs 1 or " + std::to_string(rank) + " values");
  if (c.L.size() != 1 && c.L.size() != rank)
    throw ParseError("line " + std::to_string(lline) + ": L needs 1 or " + std::to_string(rank) + " values");
  c.admissibility = assess(c.physics, c.nonlinearity);
  return c;
}

/// Canonical text form: every key, fixed order, 17 significant digits.
inline std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  auto list = [](const auto& v, auto fmt) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s;
  };
  const auto d = detail::format_double;
  os << "dimension = " << c.physics.dimension << '\n'
     << "s = " << d(c.physics.s) << '\n'
     << "beta = " << d(c.physics.beta) << '\n'
     << "lambda = " << d(c.physics.lambda) << '\n'
     << "c2 = " << d(c.nonlinearity.c2) << '\n'
     << "cmu = " << d(c.nonlinearity.cmu) << '\n'
     << "mu = " << d(c.nonlinearity.mu) << '\n'
     << "n = " << list(c.n, [](std::size_t v) { return std::to_string(v); }) << '\n'
     << "L = " << list(c.L, d) << '\n'
     << "kernel = " << to_string(c.kernel) << '\n'
     << "tau = " << d(c.solver.tau) << '\n'
     << "tol = " << d(c.solver.tol) << '\n'
     << "max_iters = " << c.solver.max_iters << '\n'
     << "T = " << d(c.evolution.T) << '\n'
     << "dt = " << d(c.evolution.dt) << '\n'
     << "record_stride = " << c.evolution.record_stride << '\n'
     << "seed = " << c.seed << '\n';
  return os.str();
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str());
}

}  // namespace fnls
