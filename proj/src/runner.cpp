#include "cascade/runner.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <fstream>

#include "cascade/constants.hpp"
#include "cascade/correlate.hpp"
#include "cascade/dressed.hpp"
#include "cascade/dynamics.hpp"
#include "cascade/errors.hpp"
#include "cascade/fitting.hpp"

namespace cascade {

namespace {

using nlohmann::json;

// Formats one CSV cell; refuses to write non-finite numbers.
std::string cell(double v) {
  if (!std::isfinite(v)) throw NumericalError("non-finite value in output");
  return fmt::format("{:.12e}", v);
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::string_view header) : path_(path) {
    body_ += header;
    body_ += '\n';
  }

  template <typename... Cells>
  void row(const Cells&... cells) {
    std::string line;
    ((line += (line.empty() ? "" : ","), line += to_cell(cells)), ...);
    body_ += line;
    body_ += '\n';
  }

  // Content is assembled in memory so a numerical failure leaves no partial file.
  std::filesystem::path commit() const {
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path_.string() + " for writing");
    out << body_;
    if (!out) throw std::runtime_error("failed writing " + path_.string());
    return path_;
  }

 private:
  static std::string to_cell(double v) { return cell(v); }
  static std::string to_cell(const std::string& s) { return s; }

  std::filesystem::path path_;
  std::string body_;
};

json params_json(const SystemParams& p) {
  return {{"delta_Eb_ueV", p.delta_Eb},       {"delta_fss_ueV", p.delta_fss},
          {"hbar_omega_ueV", p.hbar_omega},   {"delta_laser_ueV", p.delta_laser},
          {"tau_xx_ps", p.tau_xx},            {"tau_x_ps", p.tau_x},
          {"gamma_deph_per_ps", p.gamma_deph}, {"e_x_ueV", p.e_x},
          {"laser_energy_ueV", p.laser_energy()}};
}

json grid_json(const std::vector<double>& g) {
  if (g.empty()) return nullptr;
  return {{"start", g.front()}, {"stop", g.back()}, {"points", g.size()}};
}

json monitor_json(const TrajectoryMonitor& m) {
  if (m.samples == 0) return nullptr;
  return {{"max_relative_trace_drift", m.max_trace_drift},
          {"min_relative_eigenvalue", m.min_eigenvalue},
          {"samples", m.samples}};
}

json intensities_json(const SystemParams& p, const ComplexMatrix& rho) {
  json out = json::object();
  for (const auto& [id, value] : line_intensities(p, rho)) out[id.name()] = value;
  return out;
}

std::filesystem::path output_path(const Scenario& s, const RunOptions& o, std::string_view suffix) {
  return o.out_dir / (s.output_prefix + std::string(suffix));
}

void run_g2(const Scenario& s, const RunOptions& o, RunManifest& m, TrajectoryMonitor& mon) {
  LineId a = s.line_a;
  LineId b = s.line_b;
  // Positive delay always means "L photon, then R photon".
  const bool swapped = a.side == Side::R && b.side == Side::L;
  if (swapped) std::swap(a, b);

  const auto raw = g2_cross(s.params, a, b, s.tau_max_ps, s.tau_step_ps, &mon);
  const auto conv = convolve_detector(raw, s.detector_sigma_ps);
  CsvWriter csv(output_path(s, o, "_g2.csv"), "tau_ps,g2_raw,g2_convolved");
  for (std::size_t i = 0; i < raw.delay_ps.size(); ++i) {
    csv.row(raw.delay_ps[i], raw.values[i].real(), conv.values[i].real());
  }
  m.outputs.push_back(csv.commit());
  m.json["g2"] = {{"line_a", a.name()},
                  {"line_b", b.name()},
                  {"lines_swapped_for_delay_convention", swapped},
                  {"delay_convention", "tau > 0: photon on line_a detected before photon on line_b"},
                  {"detector_sigma_ps", s.detector_sigma_ps},
                  {"tau_max_ps", s.tau_max_ps},
                  {"tau_step_ps", s.tau_step_ps},
                  {"g2_raw_at_0", raw.real_at(0.0)},
                  {"g2_convolved_at_0", conv.real_at(0.0)}};
}

void run_dynamics(const Scenario& s, const RunOptions& o, RunManifest& m, TrajectoryMonitor& mon) {
  const auto resp = pulse_response(s.params, s.pulse, s.time_grid, &mon);
  CsvWriter csv(output_path(s, o, "_dynamics.csv"), "t_ps,I_L,I_R");
  for (std::size_t i = 0; i < resp.t.size(); ++i) csv.row(resp.t[i], resp.i_l[i], resp.i_r[i]);
  m.outputs.push_back(csv.commit());

  std::vector<double> t, yl, yr;
  for (std::size_t i = 0; i < resp.t.size(); ++i) {
    if (s.pulse.drive_on(resp.t[i])) {
      t.push_back(resp.t[i]);
      yl.push_back(resp.i_l[i]);
      yr.push_back(resp.i_r[i]);
    }
  }
  json fit = {{"predicted_angular_frequency_rad_per_ps",
               s.params.hbar_omega * s.params.hbar_omega / (kHbar * s.params.delta_Eb)}};
  if (t.size() >= 16) {
    const auto fl = fit_oscillation(t, yl);
    const auto fr = fit_oscillation(t, yr);
    const bool l_osc = fl.improvement >= 0.05 && fl.extrema >= 2;
    fit["I_L"] = {{"oscillation_detected", l_osc},
                  {"angular_frequency_rad_per_ps", l_osc ? json(fl.angular_frequency) : json(nullptr)},
                  {"frequency_per_ps", l_osc ? json(fl.frequency) : json(nullptr)},
                  {"damping_time_ps", l_osc ? json(fl.damping_time) : json(nullptr)},
                  {"improvement", fl.improvement}};
    fit["I_R"] = {{"oscillation_detected", fr.improvement >= 0.05 && fr.extrema >= 2},
                  {"improvement", fr.improvement}};
  }
  m.json["dynamics"] = {{"pulse_start_ps", s.pulse.start},
                        {"pulse_duration_ps", s.pulse.duration},
                        {"pulse_period_ps", s.pulse.period},
                        {"rabi_fit", fit}};
}

void run_anticrossing(const Scenario& s, const RunOptions& o, RunManifest& m) {
  const auto rows = anticrossing_map(s.params, s.detuning_grid, o.jobs);
  CsvWriter csv(output_path(s, o, "_anticrossing.csv"),
                "detuning_ueV,line,energy_ueV,intensity_per_ps");
  for (const auto& r : rows) csv.row(r.detuning, r.line.name(), r.energy, r.intensity);
  m.outputs.push_back(csv.commit());
  m.json["anticrossing"] = {{"detuning_grid_ueV", grid_json(s.detuning_grid)}};
}

void run_spectrum_map(const Scenario& s, const RunOptions& o, RunManifest& m) {
  const auto rows = power_map(s.params, s.hbar_omega_grid, o.jobs);
  CsvWriter csv(output_path(s, o, "_spectrum_map.csv"),
                "hbar_omega_ueV,line,energy_ueV,intensity_per_ps");
  for (const auto& r : rows) csv.row(r.hbar_omega, r.line.name(), r.energy, r.intensity);
  m.outputs.push_back(csv.commit());
  m.json["spectrum_map"] = {{"hbar_omega_grid_ueV", grid_json(s.hbar_omega_grid)}};
}

json line_names(const std::vector<LineId>& lines) {
  json out = json::array();
  for (const auto& id : lines) out.push_back(id.name());
  return out;
}

void run_g1(const Scenario& s, const RunOptions& o, RunManifest& m) {
  const auto trace = g1(s.params, s.lines, s.time_grid);
  CsvWriter csv(output_path(s, o, "_g1.csv"), "t_ps,g1_re,g1_im,g1_abs");
  for (std::size_t i = 0; i < trace.delay_ps.size(); ++i) {
    const Complex v = trace.values[i];
    csv.row(trace.delay_ps[i], v.real(), v.imag(), std::abs(v));
  }
  m.outputs.push_back(csv.commit());
  m.json["g1"] = {{"lines", line_names(s.lines)}, {"t_grid_ps", grid_json(s.time_grid)}};
}

void run_spectrum(const Scenario& s, const RunOptions& o, RunManifest& m) {
  const auto trace = g1(s.params, s.lines, s.time_grid);
  const auto spec = spectrum_from_g1(trace, s.energy_grid);
  const double e_l = s.params.laser_energy();
  CsvWriter csv(output_path(s, o, "_spectrum.csv"),
                "energy_frame_ueV,energy_lab_ueV,spectral_density_ps");
  for (std::size_t i = 0; i < spec.energy.size(); ++i) {
    csv.row(spec.energy[i], spec.energy[i] + e_l, spec.density[i]);
  }
  m.outputs.push_back(csv.commit());
  m.json["spectrum"] = {{"lines", line_names(s.lines)},
                        {"energy_grid_ueV", grid_json(s.energy_grid)},
                        {"truncated", spec.truncated},
                        {"warning", spec.warning.empty() ? json(nullptr) : json(spec.warning)}};
}

std::string context(const Scenario& s) {
  return fmt::format("[{}] at hbar_omega = {} ueV, delta_laser = {} ueV: ", kind_name(s.kind),
                     s.params.hbar_omega, s.params.delta_laser);
}

}  // namespace

RunManifest run(const Scenario& s, const RunOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(o.out_dir);

  RunManifest m;
  m.json["version"] = kVersion;
  m.json["scenario"] = o.scenario_name;
  m.json["kind"] = kind_name(s.kind);
  m.json["parameters"] = params_json(s.params);
  m.json["explicit_keys"] = s.explicit_keys;
  m.json["jobs"] = o.jobs;

  TrajectoryMonitor mon;
  try {
    const auto rho = steady_state(liouvillian(s.params));
    const auto chk = inspect_density_matrix(rho);
    m.json["steady_state"] = {{"trace_error", chk.trace_error},
                              {"hermiticity_error", chk.hermiticity_error},
                              {"min_eigenvalue", chk.min_eigenvalue},
                              {"line_intensities_per_ps", intensities_json(s.params, rho)}};
    switch (s.kind) {
      case ScenarioKind::g2: run_g2(s, o, m, mon); break;
      case ScenarioKind::dynamics: run_dynamics(s, o, m, mon); break;
      case ScenarioKind::anticrossing: run_anticrossing(s, o, m); break;
      case ScenarioKind::spectrum_map: run_spectrum_map(s, o, m); break;
      case ScenarioKind::g1: run_g1(s, o, m); break;
      case ScenarioKind::spectrum: run_spectrum(s, o, m); break;
    }
  } catch (const UndefinedNormalizationError& e) {
    throw UndefinedNormalizationError(context(s) + e.what(), e.line());
  } catch (const NumericalError& e) {
    throw NumericalError(context(s) + e.what());
  } catch (const InvalidInputError& e) {
    throw InvalidInputError(context(s) + e.what());
  }

  m.json["numerical_checks"] = {{"trajectories", monitor_json(mon)}};
  json files = json::array();
  for (const auto& p : m.outputs) files.push_back(p.filename().string());
  m.json["outputs"] = files;
  const auto t1 = std::chrono::steady_clock::now();
  m.json["wall_clock_seconds"] = std::chrono::duration<double>(t1 - t0).count();

  const auto manifest_path = output_path(s, o, "_manifest.json");
  std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + manifest_path.string() + " for writing");
  out << m.json.dump(2) << '\n';
  m.outputs.push_back(manifest_path);
  return m;
}

}  // namespace cascade
