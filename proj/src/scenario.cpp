#include "cascade/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>

namespace cascade {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view text, int line, std::string_view key) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError(line, "malformed number '" + std::string(text) + "' for key '" +
                               std::string(key) + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(line, "value of '" + std::string(key) + "' must be finite");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? s.npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::vector<double> parse_grid(std::string_view text, int line, std::string_view key) {
  text = trim(text);
  std::vector<double> grid;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) {
      throw ParseError(line, "grid '" + std::string(key) + "' must be start:step:stop");
    }
    const double a = parse_number(parts[0], line, key);
    const double step = parse_number(parts[1], line, key);
    const double b = parse_number(parts[2], line, key);
    if (!(step > 0.0)) throw ParseError(line, "grid '" + std::string(key) + "' needs step > 0");
    if (b < a) throw ParseError(line, "grid '" + std::string(key) + "' needs stop >= start");
    const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    if (n > 10'000'000) throw ParseError(line, "grid '" + std::string(key) + "' is too large");
    grid = uniform_grid(a, step, n);
  } else {
    for (auto part : split(text, ',')) grid.push_back(parse_number(part, line, key));
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw ParseError(line, "grid '" + std::string(key) + "' must be strictly ascending");
    }
  }
  return grid;
}

LineId parse_line(std::string_view text, int line) {
  try {
    return LineId::parse(trim(text));
  } catch (const InvalidInputError& e) {
    throw ParseError(line, e.what());
  }
}

struct Context {
  Scenario s;
  bool has_kind = false;
  std::set<std::string> seen;
  int sigma_line = 0;
  int fwhm_line = 0;
};

enum class Range { any, positive, nonnegative };

using Handler = std::function<void(Context&, std::string_view, int)>;

struct KeySpec {
  std::string section;
  Handler handle;
};

Handler number_into(double SystemParams::*field, Range range) {
  return [field, range](Context& c, std::string_view v, int line) {
    const double x = parse_number(v, line, "value");
    if (range == Range::positive && !(x > 0.0)) throw ParseError(line, "value must be > 0");
    if (range == Range::nonnegative && !(x >= 0.0)) throw ParseError(line, "value must be >= 0");
    c.s.params.*field = x;
  };
}

Handler scalar_into(double Scenario::*field, Range range) {
  return [field, range](Context& c, std::string_view v, int line) {
    const double x = parse_number(v, line, "value");
    if (range == Range::positive && !(x > 0.0)) throw ParseError(line, "value must be > 0");
    if (range == Range::nonnegative && !(x >= 0.0)) throw ParseError(line, "value must be >= 0");
    c.s.*field = x;
  };
}

Handler pulse_into(double PulseShape::*field, Range range) {
  return [field, range](Context& c, std::string_view v, int line) {
    const double x = parse_number(v, line, "value");
    if (range == Range::positive && !(x > 0.0)) throw ParseError(line, "value must be > 0");
    c.s.pulse.*field = x;
  };
}

Handler grid_into(std::vector<double> Scenario::*field) {
  return [field](Context& c, std::string_view v, int line) { c.s.*field = parse_grid(v, line, "grid"); };
}

const std::map<std::string, KeySpec>& key_table() {
  static const std::map<std::string, KeySpec> table = [] {
    std::map<std::string, KeySpec> t;
    t["kind"] = {"", [](Context& c, std::string_view v, int line) {
                   const std::string value(trim(v));
                   for (auto k : {ScenarioKind::spectrum_map, ScenarioKind::dynamics, ScenarioKind::g2,
                                  ScenarioKind::g1, ScenarioKind::spectrum, ScenarioKind::anticrossing}) {
                     if (kind_name(k) == value) {
                       c.s.kind = k;
                       c.has_kind = true;
                       return;
                     }
                   }
                   throw ParseError(line, "unknown kind '" + value +
                                              "' (expected spectrum-map, dynamics, g2, g1, spectrum "
                                              "or anticrossing)");
                 }};
    t["delta_Eb_ueV"] = {"system", number_into(&SystemParams::delta_Eb, Range::positive)};
    t["delta_fss_ueV"] = {"system", number_into(&SystemParams::delta_fss, Range::any)};
    t["hbar_omega_ueV"] = {"system", number_into(&SystemParams::hbar_omega, Range::nonnegative)};
    t["delta_laser_ueV"] = {"system", number_into(&SystemParams::delta_laser, Range::any)};
    t["tau_xx_ps"] = {"system", number_into(&SystemParams::tau_xx, Range::positive)};
    t["tau_x_ps"] = {"system", number_into(&SystemParams::tau_x, Range::positive)};
    t["gamma_deph_per_ps"] = {"system", number_into(&SystemParams::gamma_deph, Range::nonnegative)};
    t["e_x_ueV"] = {"system", number_into(&SystemParams::e_x, Range::any)};

    t["detuning_ueV"] = {"grid", grid_into(&Scenario::detuning_grid)};
    t["hbar_omega_grid_ueV"] = {"grid", grid_into(&Scenario::hbar_omega_grid)};
    t["t_ps"] = {"grid", grid_into(&Scenario::time_grid)};
    t["energy_ueV"] = {"grid", grid_into(&Scenario::energy_grid)};
    t["tau_max_ps"] = {"grid", scalar_into(&Scenario::tau_max_ps, Range::nonnegative)};
    t["tau_step_ps"] = {"grid", scalar_into(&Scenario::tau_step_ps, Range::positive)};

    t["line_a"] = {"lines", [](Context& c, std::string_view v, int line) { c.s.line_a = parse_line(v, line); }};
    t["line_b"] = {"lines", [](Context& c, std::string_view v, int line) { c.s.line_b = parse_line(v, line); }};
    t["lines"] = {"lines", [](Context& c, std::string_view v, int line) {
                    c.s.lines.clear();
                    for (auto part : split(v, ',')) {
                      const LineId id = parse_line(part, line);
                      if (std::find(c.s.lines.begin(), c.s.lines.end(), id) != c.s.lines.end()) {
                        throw ParseError(line, "line " + id.name() + " listed twice");
                      }
                      c.s.lines.push_back(id);
                    }
                  }};

    t["pulse_duration_ps"] = {"pulse", pulse_into(&PulseShape::duration, Range::positive)};
    t["pulse_start_ps"] = {"pulse", pulse_into(&PulseShape::start, Range::any)};
    t["pulse_period_ps"] = {"pulse", pulse_into(&PulseShape::period, Range::positive)};

    t["detector_sigma_ps"] = {"detector", [](Context& c, std::string_view v, int line) {
                                c.s.detector_sigma_ps = parse_number(v, line, "detector_sigma_ps");
                                if (c.s.detector_sigma_ps < 0.0) throw ParseError(line, "value must be >= 0");
                                c.sigma_line = line;
                              }};
    t["detector_fwhm_ps"] = {"detector", [](Context& c, std::string_view v, int line) {
                               const double fwhm = parse_number(v, line, "detector_fwhm_ps");
                               if (fwhm < 0.0) throw ParseError(line, "value must be >= 0");
                               c.s.detector_sigma_ps = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
                               c.fwhm_line = line;
                             }};
    t["output_prefix"] = {"output", [](Context& c, std::string_view v, int line) {
                            const std::string value(trim(v));
                            if (value.empty() || value.find_first_of("/\\") != std::string::npos) {
                              throw ParseError(line, "output_prefix must be a non-empty file name stem");
                            }
                            c.s.output_prefix = value;
                          }};
    return t;
  }();
  return table;
}

const std::set<std::string> kSections{"system", "grid", "lines", "pulse", "detector", "output"};

}  // namespace

std::string_view kind_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::spectrum_map: return "spectrum-map";
    case ScenarioKind::dynamics: return "dynamics";
    case ScenarioKind::g2: return "g2";
    case ScenarioKind::g1: return "g1";
    case ScenarioKind::spectrum: return "spectrum";
    case ScenarioKind::anticrossing: return "anticrossing";
  }
  return "?";
}

Scenario parse_scenario(std::string_view text) {
  Context c;
  std::string section;
  int line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!kSections.contains(section)) {
        throw ParseError(line_no, "unknown section [" + section + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    const auto it = key_table().find(key);
    if (it == key_table().end()) throw ParseError(line_no, "unknown key '" + key + "'");
    if (!section.empty() && it->second.section != section) {
      throw ParseError(line_no, "key '" + key + "' does not belong to section [" + section + "]");
    }
    if (!c.seen.insert(key).second) throw ParseError(line_no, "duplicate key '" + key + "'");
    if (value.empty()) throw ParseError(line_no, "missing value for '" + key + "'");
    it->second.handle(c, value, line_no);
    c.s.explicit_keys[key] = std::string(value);
  }

  if (!c.has_kind) {
    throw ParseError(0, "missing required key 'kind' (one of spectrum-map, dynamics, g2, g1, "
                        "spectrum, anticrossing)");
  }
  if (c.sigma_line && c.fwhm_line) {
    throw ParseError(std::max(c.sigma_line, c.fwhm_line),
                     "detector_sigma_ps and detector_fwhm_ps are mutually exclusive");
  }

  Scenario& s = c.s;
  if (!c.seen.contains("hbar_omega_ueV")) s.params.hbar_omega = s.params.delta_Eb / 13.0;
  if (s.output_prefix.empty()) s.output_prefix = std::string(kind_name(s.kind));
  try {
    s.params.validate();
    s.pulse.validate();
  } catch (const InvalidInputError& e) {
    throw ParseError(0, e.what());
  }

  auto require = [&](const char* key) {
    if (!c.seen.contains(key)) {
      throw ParseError(0, std::string("kind '") + std::string(kind_name(s.kind)) +
                              "' requires key '" + key + "'");
    }
  };

  switch (s.kind) {
    case ScenarioKind::g2:
      require("line_a");
      require("line_b");
      break;
    case ScenarioKind::anticrossing:
      if (s.detuning_grid.empty()) s.detuning_grid = parse_grid("-100:2:100", 0, "detuning_ueV");
      break;
    case ScenarioKind::spectrum_map:
      if (s.hbar_omega_grid.empty()) {
        s.hbar_omega_grid = uniform_grid(0.0, s.params.delta_Eb / 200.0, 41);
      }
      if (s.hbar_omega_grid.front() < 0.0) {
        throw ParseError(0, "hbar_omega_grid_ueV must not contain negative values");
      }
      break;
    case ScenarioKind::dynamics:
      if (s.time_grid.empty()) {
        s.time_grid = uniform_grid(s.pulse.start - 1000.0, 10.0,
                                   static_cast<std::size_t>((s.pulse.duration + 6000.0) / 10.0) + 1);
      }
      if (s.time_grid.front() > s.pulse.start) {
        throw ParseError(0, "t_ps must start at or before pulse_start_ps");
      }
      break;
    case ScenarioKind::g1:
    case ScenarioKind::spectrum:
      require("lines");
      if (s.time_grid.empty()) {
        s.time_grid = uniform_grid(0.0, 2.0, s.kind == ScenarioKind::g1 ? 4001 : 10001);
      }
      if (s.time_grid.front() != 0.0) throw ParseError(0, "t_ps must start at 0 for g1 and spectrum");
      break;
  }
  if (s.kind == ScenarioKind::spectrum && s.energy_grid.empty()) {
    const auto catalog = line_catalog(s.params, dressed_states(s.params));
    double lo = INFINITY;
    double hi = -INFINITY;
    for (const auto& id : s.lines) {
      const double e = find_line(catalog, id).frame_energy;
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    const double margin = std::max(50.0, 0.25 * (hi - lo));
    s.energy_grid = uniform_grid(lo - margin, 0.25,
                                 static_cast<std::size_t>((hi - lo + 2.0 * margin) / 0.25) + 1);
  }
  return s;
}

}  // namespace cascade
