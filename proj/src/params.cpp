#include "slp/params.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace slp::params {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::domain_error(what);
}

}  // namespace

void PhysicalConstants::validate() const {
  require(c0 > 0, "c0 must be positive");
  require(lambda_p > 0, "lambda_p must be positive");
  require(omega_hf >= 0, "omega_hf must be non-negative");
}

EnsembleParams EnsembleParams::from_od(double od, double length, double gamma_s,
                                       double gamma_e, double c0,
                                       double n_atoms) {
  EnsembleParams p;
  p.od = od;
  p.length = length;
  p.gamma_s = gamma_s;
  p.gamma_e = gamma_e;
  p.g_n = od * c0 * gamma_e / (4.0 * length);
  p.n_atoms = n_atoms;
  p.validate(c0);
  return p;
}

void EnsembleParams::validate(double c0) const {
  require(od > 0, "od must be positive");
  require(length > 0, "length must be positive");
  require(gamma_s >= 0, "gamma_s must be non-negative");
  require(gamma_e > 0, "gamma_e must be positive");
  require(g_n >= 0, "g_n must be non-negative");
  const double expected = od * c0 * gamma_e / (4.0 * length);
  require(std::abs(g_n - expected) <= 1e-9 * expected,
          "g_n inconsistent with the OD convention g_n = od*c0*gamma_e/(4L)");
}

void ControlParams::validate() const {
  require(omega_fwc >= 0, "omega_fwc must be non-negative");
  require(omega_bwc >= 0, "omega_bwc must be non-negative");
  require(ramp_time > 0, "ramp_time must be positive");
}

void CavityAnalogyParams::validate() const {
  require(g_single >= 0 && kappa >= 0 && q_factor >= 0 && tau_diss >= 0 &&
              f0 >= 0,
          "cavity-analogy rates must be non-negative");
  if (q_factor > 0 && f0 > 0 && tau_diss > 0) {
    const double expected = kTwoPi * f0 * tau_diss;
    require(std::abs(q_factor - expected) <= 1e-9 * expected,
            "q_factor inconsistent with 2*pi*f0*tau_diss");
  }
}

double infer_rabi_from_delay(double od, double gamma_e, double tau_g) {
  require(od > 0 && gamma_e > 0 && tau_g > 0,
          "infer_rabi_from_delay: all inputs must be positive");
  return std::sqrt(od * gamma_e / tau_g);
}

double infer_gn_from_vg(double tau_g, double length, double omega, double c0) {
  require(tau_g > 0 && length > 0 && omega >= 0 && c0 > 0,
          "infer_gn_from_vg: invalid input");
  require(tau_g * c0 >= length,
          "infer_gn_from_vg: superluminal group velocity requested");
  return omega * omega * (c0 * tau_g / length - 1.0);
}

double cooperativity(double g_single, double n_atoms, double kappa,
                     double gamma_e) {
  require(kappa > 0 && gamma_e > 0,
          "cooperativity: kappa and gamma_e must be positive");
  return 4.0 * g_single * g_single * n_atoms / (kappa * gamma_e);
}

double q_factor(double f0, double tau_diss) {
  require(f0 > 0, "q_factor: f0 must be positive");
  require(tau_diss >= 0, "q_factor: tau_diss must be non-negative");
  return kTwoPi * f0 * tau_diss;
}

namespace {

struct RawFile {
  std::map<std::string, double> values;
};

RawFile parse_raw(const std::string& text) {
  RawFile raw;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // skip blank lines
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("parameter file line " +
                                  std::to_string(lineno) + ": missing '='");
    }
    std::string key = line.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    if (key.empty()) {
      throw std::invalid_argument("parameter file line " +
                                  std::to_string(lineno) + ": empty key");
    }
    if (raw.values.count(key)) {
      throw std::invalid_argument("parameter file line " +
                                  std::to_string(lineno) + ": duplicate key '" +
                                  key + "'");
    }
    try {
      raw.values[key] = parse_quantity(line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("parameter file line " +
                                  std::to_string(lineno) + ": " + e.what());
    }
  }
  return raw;
}

}  // namespace

void ParameterSet::validate() const {
  constants.validate();
  ensemble.validate(constants.c0);
  controls.validate();
  cavity.validate();
  require(delta_k_l >= 0, "delta_k_l must be non-negative");
  for (const auto& ch : channels) {
    require(ch.od_eff > 0, "channel od_eff must be positive");
    require(ch.overlap > 0 && ch.overlap <= 1.0,
            "channel overlap must be in (0, 1]");
  }
}

ParameterSet parse_parameter_text(const std::string& text) {
  const RawFile raw = parse_raw(text);
  ParameterSet p = default_rb87();
  p.channels.clear();

  std::map<int, ChannelSpec> channels;
  double od = p.ensemble.od;
  double length = p.ensemble.length;
  double gamma_s = p.ensemble.gamma_s;
  double gamma_e = p.ensemble.gamma_e;
  double n_atoms = p.ensemble.n_atoms;

  for (const auto& [key, value] : raw.values) {
    if (key == "c0") p.constants.c0 = value;
    else if (key == "lambda_p") p.constants.lambda_p = value;
    else if (key == "omega_hf") p.constants.omega_hf = value;
    else if (key == "od") od = value;
    else if (key == "length") length = value;
    else if (key == "gamma_s") gamma_s = value;
    else if (key == "gamma_e") gamma_e = value;
    else if (key == "n_atoms") n_atoms = value;
    else if (key == "omega_fwc") p.controls.omega_fwc = value;
    else if (key == "omega_bwc") p.controls.omega_bwc = value;
    else if (key == "delta") p.controls.delta = value;
    else if (key == "ramp_time") p.controls.ramp_time = value;
    else if (key == "delta_k_l") p.delta_k_l = value;
    else if (key == "g_single") p.cavity.g_single = value;
    else if (key == "kappa") p.cavity.kappa = value;
    else if (key.rfind("ch", 0) == 0) {
      const auto dot = key.find('.');
      if (dot == std::string::npos) {
        throw std::invalid_argument("unknown parameter key '" + key + "'");
      }
      int id = 0;
      try {
        id = std::stoi(key.substr(2, dot - 2));
      } catch (...) {
        throw std::invalid_argument("unknown parameter key '" + key + "'");
      }
      const std::string field = key.substr(dot + 1);
      auto& ch = channels[id];
      ch.id = id;
      if (field == "od_eff") ch.od_eff = value;
      else if (field == "overlap") ch.overlap = value;
      else throw std::invalid_argument("unknown parameter key '" + key + "'");
    } else {
      throw std::invalid_argument("unknown parameter key '" + key + "'");
    }
  }

  p.ensemble = EnsembleParams::from_od(od, length, gamma_s, gamma_e,
                                       p.constants.c0, n_atoms);
  for (auto& [id, ch] : channels) {
    if (ch.od_eff == 0.0) ch.od_eff = p.ensemble.od;
    p.channels.push_back(ch);
  }
  if (p.channels.empty()) p.channels = default_rb87().channels;
  p.validate();
  return p;
}

ParameterSet load_parameter_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open parameter file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_parameter_text(buf.str());
}

ParameterSet default_rb87() {
  ParameterSet p;
  p.constants.c0 = kSpeedOfLight;
  p.constants.lambda_p = 795e-9;
  p.constants.omega_hf = kTwoPi * 6.835e9;

  const double gamma_e = kTwoPi * 5.8e6;
  p.ensemble = EnsembleParams::from_od(60.0, 10e-3, kTwoPi * 60e3, gamma_e,
                                       p.constants.c0);

  // FWC Rabi frequency matching the 2 us group delay at OD 60.
  p.controls.omega_fwc = infer_rabi_from_delay(60.0, gamma_e, 2e-6);
  p.controls.omega_bwc = p.controls.omega_fwc;
  p.controls.delta = kTwoPi * 4e6;
  p.controls.ramp_time = 100e-9;

  p.cavity.g_single = kTwoPi * 0.24e6;
  p.cavity.kappa = kTwoPi * 0.13e6;
  p.cavity.f0 = p.constants.f0();

  p.delta_k_l = 0.05;

  // Channel 2 tuned so its EIT group delay lands near 2.4 us with a lower
  // effective OD, matching the ordering seen with two spatially distinct
  // probes; see README for the tuning procedure.
  p.channels = {{1, 60.0, 1.0}, {2, 52.0, 0.85}};
  p.validate();
  return p;
}

}  // namespace slp::params
