#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fnls/analysis.hpp"
#include "fnls/errors.hpp"
#include "fnls/evolution.hpp"
#include "fnls/functionals.hpp"
#include "fnls/ground_state.hpp"
#include "fnls/model.hpp"

namespace fnls {

using Json = nlohmann::ordered_json;

/// A CSV cell: empty, integer, real (printed with 17 significant digits) or text.
using CsvCell = std::variant<std::monostate, long long, double, std::string>;

inline std::string format_cell(const CsvCell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(double v) const {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return buf;
    }
    std::string operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, cell);
}

inline CsvCell optional_cell(const std::optional<double>& v) {
  return v ? CsvCell{*v} : CsvCell{};
}

/// Writes rows as they arrive and flushes after each one, so partial output survives aborts.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : os_(path) {
    if (!os_) throw Error("cannot open '" + path + "' for writing");
    write_line(header);
  }

  void row(const std::vector<CsvCell>& cells) {
    std::vector<std::string> text;
    text.reserve(cells.size());
    for (const auto& c : cells) text.push_back(format_cell(c));
    write_line(text);
  }

 private:
  void write_line(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) os_ << (i ? "," : "") << fields[i];
    os_ << '\n';
    os_.flush();
  }
  std::ofstream os_;
};

inline const std::vector<std::string>& history_columns() {
  static const std::vector<std::string> c{"iter", "energy", "kinetic", "interaction", "residual", "kappa"};
  return c;
}

inline const std::vector<std::string>& trajectory_columns() {
  static const std::vector<std::string> c{"t", "mass", "energy_J", "linf", "orbit_distance", "overlap_phase"};
  return c;
}

inline const std::vector<std::string>& energy_columns() {
  static const std::vector<std::string> c{"mass", "kinetic", "interaction", "total"};
  return c;
}

inline std::vector<CsvCell> history_row(const HistoryEntry& h) {
  return {static_cast<long long>(h.iter), h.energy.total, h.energy.kinetic, h.energy.interaction, h.residual, h.kappa};
}

inline std::vector<CsvCell> trajectory_row(const TrajectoryRecord& r) {
  return {r.t, r.mass, r.energy_J, r.linf, optional_cell(r.orbit_distance), optional_cell(r.overlap_phase)};
}

inline std::vector<CsvCell> energy_row(const EnergyBreakdown& e) { return {e.mass, e.kinetic, e.interaction, e.total}; }

inline Json to_json(const EnergyBreakdown& e) {
  return Json{{"mass", e.mass}, {"kinetic", e.kinetic}, {"interaction", e.interaction}, {"total", e.total}};
}

inline Json to_json(const AdmissibilityReport& r) {
  Json j{{"existence_ok", r.existence_ok}, {"uniqueness_ok", r.uniqueness_ok}, {"negative_energy_ok", r.negative_energy_ok}};
  j["violations"] = Json::array();
  for (const auto& v : r.violations)
    j["violations"].push_back({{"constraint", v.constraint}, {"message", v.message}, {"severity", to_string(v.severity)}});
  j["checks"] = Json::array();
  for (const auto& c : r.checks)
    j["checks"].push_back({{"name", c.name}, {"lower", c.lower}, {"value", c.value}, {"upper", c.upper}, {"ok", c.ok}});
  return j;
}

inline Json to_json(const ExponentFit& f) {
  return Json{{"name", f.name},           {"predicted", f.predicted}, {"fitted", f.fitted},
              {"rel_error", f.rel_error}, {"abs_error", f.abs_error}, {"r_squared", f.r_squared},
              {"points", f.samples.size()}, {"flagged", f.flagged}};
}

inline Json to_json(const GroundStateResult& g) {
  return Json{{"energy", to_json(g.energy)},
              {"kappa", g.kappa},
              {"el_residual", g.el_residual},
              {"energy_uncertainty", g.energy_uncertainty},
              {"iterations", g.iterations},
              {"converged", g.converged},
              {"final_step", g.final_step},
              {"boundary_mass_fraction", g.boundary_mass_fraction},
              {"warnings", g.warnings}};
}

/// Pass/fail bookkeeping for a report: `assertions` in the JSON summary, exit code 2 on any failure.
class Assertions {
 public:
  void check(const std::string& name, bool ok) { items_.emplace_back(name, ok); }
  bool all_ok() const {
    for (const auto& [n, ok] : items_)
      if (!ok) return false;
    return true;
  }
  Json to_json() const {
    Json j = Json::object();
    for (const auto& [n, ok] : items_) j[n] = ok;
    return j;
  }

 private:
  std::vector<std::pair<std::string, bool>> items_;
};

inline void write_json(const std::string& path, const Json& j) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  os << j.dump(2) << '\n';
}

}  // namespace fnls
