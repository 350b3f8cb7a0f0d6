// slplab: scenario runner and phase-matching solver for stationary light
// pulses in a Lambda-type atomic ensemble.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "slp/analysis.hpp"
#include "slp/dynamics.hpp"
#include "slp/geometry.hpp"
#include "slp/params.hpp"
#include "slp/scenario.hpp"
#include "slp/sequence.hpp"
#include "slp/trace_io.hpp"
#include "slp/units.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitConfig = 2;

slp::params::ParameterSet load_params(const std::string& path) {
  if (path.empty()) return slp::params::default_rb87();
  return slp::params::load_parameter_file(path);
}

void print_solution_row(const slp::geometry::PhaseMatchSolution& s) {
  std::printf("%+9.4f  %12.6e  %12.6e  %12.6e  %10.4e  %8.4f\n",
              s.angle * 360.0 / slp::kTwoPi, s.k_probe.norm(), s.k_fwd.norm(),
              s.k_bwd.norm(), s.delta_k, s.delta_k_l);
}

nlohmann::ordered_json solution_json(const slp::geometry::PhaseMatchSolution& s) {
  return {{"angle_deg", s.angle * 360.0 / slp::kTwoPi},
          {"angle_rad", s.angle},
          {"k_probe", s.k_probe.norm()},
          {"k_fwd", s.k_fwd.norm()},
          {"k_bwd", s.k_bwd.norm()},
          {"delta_k", s.delta_k},
          {"delta_k_l", s.delta_k_l}};
}

int cmd_phase_match(const std::string& params_path, bool mirror,
                    const std::string& azimuth_text, bool json_out) {
  const auto p = load_params(params_path);
  const auto freqs =
      slp::geometry::make_beam_frequencies(p.constants, p.controls.delta);
  const double azimuth =
      azimuth_text.empty() ? 0.0 : slp::parse_quantity(azimuth_text);
  const auto sol = slp::geometry::solve(freqs, p.constants.c0,
                                        p.ensemble.length, azimuth);
  if (json_out) {
    nlohmann::ordered_json j;
    j["solutions"] = nlohmann::ordered_json::array({solution_json(sol)});
    if (mirror) j["solutions"].push_back(solution_json(mirror_solution(sol)));
    std::cout << j.dump(1) << "\n";
  } else {
    std::printf("%9s  %12s  %12s  %12s  %10s  %8s\n", "angle/deg", "|k_probe|",
                "|k_fwd|", "|k_bwd|", "dk (1/m)", "dk*L");
    print_solution_row(sol);
    if (mirror) print_solution_row(slp::geometry::mirror_solution(sol));
  }
  return kExitOk;
}

std::string default_out_dir() {
  const char* env = std::getenv("SLP_LAB_OUT");
  return env ? env : ".";
}

slp::sequence::Timeline load_sequence_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open sequence file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return slp::sequence::parse_timeline(buf.str());
}

int cmd_run(const std::string& params_path, const std::string& scenario,
            const std::string& sequence_path, const std::string& out_dir,
            int grid_nz, const std::string& grid_dt, const std::string& solver_name,
            bool json_out) {
  const auto p = load_params(params_path);

  slp::dynamics::Grid grid;
  grid.length = p.ensemble.length;
  if (grid_nz > 0) grid.n_z = grid_nz;
  if (!grid_dt.empty()) grid.dt = slp::parse_quantity(grid_dt);
  grid.sample_dt = std::max(grid.sample_dt, grid.dt);

  const auto solver = [&]() {
    if (solver_name == "adiabatic") return slp::dynamics::SolverKind::Adiabatic;
    if (solver_name == "full") return slp::dynamics::SolverKind::FullCoherence;
    throw std::invalid_argument("unknown solver '" + solver_name + "'");
  }();

  std::filesystem::create_directories(out_dir);
  const auto out_path = [&](const std::string& name) {
    return (std::filesystem::path(out_dir) / name).string();
  };

  if (scenario == "fig4-sweep") {
    const auto result = slp::scenario::run_fig4_sweep(p, grid, solver);
    nlohmann::ordered_json j;
    j["trap_times_us"] = nlohmann::ordered_json::array();
    for (double t : result.trap_times) j["trap_times_us"].push_back(t * 1e6);
    for (const auto& [id, etas] : result.efficiencies) {
      j["release_efficiency"]["ch" + std::to_string(id)] = etas;
      const auto& f = result.fits.at(id);
      j["fit"]["ch" + std::to_string(id)] = {{"amplitude", f.amplitude},
                                             {"tau_us", f.tau * 1e6},
                                             {"residual", f.residual}};
    }
    j["summary"] = nlohmann::json::parse(result.report.to_json());
    for (size_t i = 0; i < result.runs.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof(name), "traces_trap_%.1fus.csv",
                    result.trap_times[i] * 1e6);
      slp::io::write_traces_csv(out_path(name), result.runs[i]);
    }
    slp::io::write_text_atomic(out_path("report.json"), j.dump(1) + "\n");
    if (json_out) std::cout << j.dump(1) << "\n";
    else std::cout << result.report.to_table();
    return kExitOk;
  }

  if (scenario == "storage-decay") {
    const auto result = slp::scenario::run_storage_decay(p, grid, solver);
    nlohmann::ordered_json j;
    j["storage_times_us"] = nlohmann::ordered_json::array();
    for (double t : result.storage_times) j["storage_times_us"].push_back(t * 1e6);
    j["efficiencies"] = result.efficiencies;
    j["fit"] = {{"amplitude", result.fit.amplitude},
                {"tau_us", result.fit.tau * 1e6},
                {"rate", 1.0 / result.fit.tau},
                {"expected_rate", result.expected_rate}};
    slp::io::write_text_atomic(out_path("report.json"), j.dump(1) + "\n");
    if (json_out) std::cout << j.dump(1) << "\n";
    else {
      std::printf("fitted decay rate: %.6g 1/s (expected 2*gamma_s = %.6g)\n",
                  1.0 / result.fit.tau, result.expected_rate);
    }
    return kExitOk;
  }

  slp::sequence::Timeline timeline;
  if (!sequence_path.empty()) {
    timeline = load_sequence_file(sequence_path);
  } else {
    timeline = slp::scenario::builtin_timeline(scenario);
  }
  const auto traces = slp::scenario::run_timeline(timeline, p, grid, solver);
  slp::io::write_traces_csv(out_path("traces.csv"), traces);
  slp::io::write_text_atomic(out_path("run.json"),
                             slp::io::run_sidecar_json(p, grid, traces));

  const auto w = slp::scenario::derive_windows(timeline);
  nlohmann::ordered_json j;
  for (const auto& ch : traces.channels) {
    nlohmann::ordered_json cj;
    const double e_in = slp::analysis::pulse_energy(ch.input, 0, w.duration);
    cj["input_energy"] = e_in;
    if (w.bwc_off > 0) {
      cj["release_efficiency"] =
          (slp::analysis::pulse_energy(ch.fwd, w.bwc_off, w.duration) +
           slp::analysis::pulse_energy(ch.bwd, w.bwc_off, w.duration)) /
          e_in;
    } else if (w.fwc_on > 0) {
      cj["retrieval_efficiency"] =
          slp::analysis::pulse_energy(ch.fwd, w.fwc_on, w.duration) / e_in;
      try {
        cj["group_delay_us"] =
            slp::analysis::group_delay(ch.fwd, ch.input, w.storage_time,
                                       w.fwc_on, w.duration) *
            1e6;
      } catch (const std::domain_error&) {
        // ambiguous peak; omit
      }
    }
    const auto& led = ch.ledger.back();
    cj["ledger"] = {{"input_ex", led.input_ex},
                    {"emitted_fwd", led.emitted_fwd},
                    {"emitted_bwd", led.emitted_bwd},
                    {"dissipated_e", led.dissipated_e},
                    {"dissipated_s", led.dissipated_s},
                    {"stored", led.stored},
                    {"closure_error", led.closure_error()}};
    j["ch" + std::to_string(ch.channel)] = std::move(cj);
  }
  slp::io::write_text_atomic(out_path("report.json"), j.dump(1) + "\n");
  if (json_out) std::cout << j.dump(1) << "\n";
  else {
    std::cout << "wrote " << out_path("traces.csv") << ", run.json, report.json\n";
    for (const auto& [key, cj] : j.items()) {
      std::cout << key << ": ";
      if (cj.contains("release_efficiency")) {
        std::cout << "release efficiency "
                  << cj["release_efficiency"].get<double>();
      } else if (cj.contains("retrieval_efficiency")) {
        std::cout << "retrieval efficiency "
                  << cj["retrieval_efficiency"].get<double>();
        if (cj.contains("group_delay_us")) {
          std::cout << ", group delay " << cj["group_delay_us"].get<double>()
                    << " us";
        }
      }
      std::cout << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stationary-light-pulse simulation laboratory"};
  app.require_subcommand(1);

  std::string params_path, azimuth_text, scenario, sequence_path;
  std::string out_dir = default_out_dir();
  std::string grid_dt, solver_name = "adiabatic";
  int grid_nz = 0;
  bool mirror = false, json_out = false;

  auto* pm = app.add_subcommand("phase-match",
                                "solve the SLP phase-matching geometry");
  pm->add_option("--params", params_path, "parameter file");
  pm->add_flag("--mirror", mirror, "also print the mirrored solution");
  pm->add_option("--azimuth", azimuth_text,
                 "cone azimuth about the FWC axis (e.g. 90deg)");
  pm->add_flag("--json", json_out, "machine-readable output");

  auto* run = app.add_subcommand("run", "run a simulation scenario");
  run->add_option("--params", params_path, "parameter file");
  run->add_option("--scenario", scenario, "built-in scenario name");
  run->add_option("--sequence", sequence_path, "timeline (.seq) file");
  run->add_option("--out", out_dir, "output directory (default $SLP_LAB_OUT)");
  run->add_option("--grid.nz", grid_nz, "spatial points");
  run->add_option("--grid.dt", grid_dt, "time step, e.g. 0.5ns");
  run->add_option("--solver", solver_name, "adiabatic|full");
  run->add_flag("--json", json_out, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (pm->parsed()) {
      return cmd_phase_match(params_path, mirror, azimuth_text, json_out);
    }
    if (scenario.empty() && sequence_path.empty()) {
      std::cerr << "run: need --scenario or --sequence\n";
      return kExitConfig;
    }
    if (!scenario.empty() && !slp::scenario::is_known(scenario)) {
      std::cerr << "unknown scenario '" << scenario << "'\n";
      return kExitConfig;
    }
    return cmd_run(params_path, scenario, sequence_path, out_dir, grid_nz,
                   grid_dt, solver_name, json_out);
  } catch (const slp::dynamics::NumericalBlowup& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const slp::sequence::ParseError& e) {
    std::cerr << "sequence error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}
