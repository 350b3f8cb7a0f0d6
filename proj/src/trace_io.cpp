#include "slp/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace slp::io {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string traces_to_csv(const TraceSet& traces) {
  std::ostringstream os;
  os << "t_us, ch, end, intensity\n";
  for (const auto& ch : traces.channels) {
    for (const Trace* tr : {&ch.input, &ch.fwd, &ch.bwd}) {
      const std::string end = trace_end_name(tr->end);
      for (size_t i = 0; i < tr->t.size(); ++i) {
        os << fmt(tr->t[i] * 1e6) << ", " << tr->channel << ", " << end << ", "
           << fmt(tr->intensity[i]) << "\n";
      }
    }
  }
  return os.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
  }
}

void write_traces_csv(const std::string& path, const TraceSet& traces) {
  write_text_atomic(path, traces_to_csv(traces));
}

TraceSet read_traces_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");

  std::map<std::pair<int, std::string>, Trace> acc;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string t_s, ch_s, end_s, i_s;
    if (!std::getline(row, t_s, ',') || !std::getline(row, ch_s, ',') ||
        !std::getline(row, end_s, ',') || !std::getline(row, i_s)) {
      throw std::invalid_argument("CSV line " + std::to_string(lineno) +
                                  ": expected 4 columns");
    }
    const auto strip = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
      return s;
    };
    const int ch = std::stoi(strip(ch_s));
    const std::string end = strip(end_s);
    Trace& tr = acc[{ch, end}];
    tr.channel = ch;
    if (end == "fwd") tr.end = TraceEnd::Forward;
    else if (end == "bwd") tr.end = TraceEnd::Backward;
    else if (end == "in") tr.end = TraceEnd::Input;
    else throw std::invalid_argument("CSV line " + std::to_string(lineno) +
                                     ": unknown end '" + end + "'");
    tr.t.push_back(std::stod(strip(t_s)) * 1e-6);
    tr.intensity.push_back(std::stod(strip(i_s)));
  }

  std::map<int, ChannelTraces> by_channel;
  for (auto& [key, tr] : acc) {
    auto& ch = by_channel[key.first];
    ch.channel = key.first;
    if (tr.end == TraceEnd::Forward) ch.fwd = std::move(tr);
    else if (tr.end == TraceEnd::Backward) ch.bwd = std::move(tr);
    else ch.input = std::move(tr);
  }
  TraceSet out;
  for (auto& [id, ch] : by_channel) out.channels.push_back(std::move(ch));
  return out;
}

std::string run_sidecar_json(const params::ParameterSet& p,
                             const dynamics::Grid& grid,
                             const TraceSet& traces) {
  nlohmann::ordered_json j;
  j["constants"] = {{"c0", p.constants.c0},
                    {"lambda_p", p.constants.lambda_p},
                    {"omega_hf", p.constants.omega_hf}};
  j["ensemble"] = {{"od", p.ensemble.od},
                   {"length", p.ensemble.length},
                   {"gamma_s", p.ensemble.gamma_s},
                   {"gamma_e", p.ensemble.gamma_e},
                   {"g_n_internal", p.ensemble.g_n},
                   {"n_atoms", p.ensemble.n_atoms}};
  j["controls"] = {{"omega_fwc", p.controls.omega_fwc},
                   {"omega_bwc", p.controls.omega_bwc},
                   {"delta", p.controls.delta},
                   {"ramp_time", p.controls.ramp_time}};
  j["delta_k_l"] = p.delta_k_l;
  j["grid"] = {{"n_z", grid.n_z},
               {"length", grid.length},
               {"dt", grid.dt},
               {"sample_dt", grid.sample_dt}};
  j["channels"] = nlohmann::ordered_json::array();
  for (const auto& ch : p.channels) {
    j["channels"].push_back(
        {{"id", ch.id}, {"od_eff", ch.od_eff}, {"overlap", ch.overlap}});
  }
  j["ledger_history"] = nlohmann::ordered_json::array();
  for (const auto& ch : traces.channels) {
    nlohmann::ordered_json hist = nlohmann::ordered_json::array();
    for (const auto& s : ch.ledger) {
      hist.push_back({{"t", s.t},
                      {"input_ex", s.input_ex},
                      {"emitted_fwd", s.emitted_fwd},
                      {"emitted_bwd", s.emitted_bwd},
                      {"dissipated_e", s.dissipated_e},
                      {"dissipated_s", s.dissipated_s},
                      {"stored", s.stored}});
    }
    j["ledger_history"].push_back(
        {{"channel", ch.channel}, {"samples", std::move(hist)}});
  }
  return j.dump(1) + "\n";
}

}  // namespace slp::io
