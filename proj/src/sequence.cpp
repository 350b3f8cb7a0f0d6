#include "slp/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace slp::sequence {

double event_time(const Event& e) {
  return std::visit(
      [](const auto& ev) {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, ProbePulse>) return ev.t_center;
        else return ev.t_start;
      },
      e);
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

double parse_value(const std::string& text, int line, const std::string& what) {
  try {
    return parse_quantity(text);
  } catch (const std::invalid_argument& e) {
    throw ParseError(line, "bad " + what + ": " + e.what());
  }
}

// Accepts "key=value" possibly spanning two tokens around '='.
std::map<std::string, std::string> parse_kv(
    const std::vector<std::string>& tokens, size_t start, int line) {
  std::map<std::string, std::string> kv;
  std::string joined;
  for (size_t i = start; i < tokens.size(); ++i) {
    if (!joined.empty()) joined += ' ';
    joined += tokens[i];
  }
  std::istringstream in(joined);
  std::string item;
  // items separated by whitespace; each must contain '='
  std::vector<std::string> items;
  while (in >> item) items.push_back(item);
  // re-join items where the unit was separated by a space ("fwhm=2 us")
  for (size_t i = 0; i < items.size(); ++i) {
    const auto eq = items[i].find('=');
    if (eq == std::string::npos) {
      throw ParseError(line, "expected key=value, got '" + items[i] + "'");
    }
    std::string key = items[i].substr(0, eq);
    std::string value = items[i].substr(eq + 1);
    while (i + 1 < items.size() &&
           items[i + 1].find('=') == std::string::npos) {
      value += ' ' + items[++i];
    }
    if (kv.count(key)) throw ParseError(line, "duplicate field '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

ControlField parse_field(const std::string& tok, int line) {
  if (tok == "FWC") return ControlField::FWC;
  if (tok == "BWC") return ControlField::BWC;
  throw ParseError(line, "expected FWC or BWC, got '" + tok + "'");
}

void validate_timeline(const Timeline& t) {
  for (const auto& e : t.events) {
    const double time = event_time(e);
    if (time < 0 || time > t.duration) {
      throw ParseError(0, "event at " + std::to_string(time * 1e6) +
                              " us outside [0, duration]");
    }
  }
  // Overlapping ramps on the same control are rejected.
  for (ControlField f : {ControlField::FWC, ControlField::BWC}) {
    const SetControl* prev = nullptr;
    for (const auto& e : t.events) {
      const auto* sc = std::get_if<SetControl>(&e);
      if (!sc || sc->field != f) continue;
      if (prev && sc->t_start < prev->t_start + prev->ramp) {
        throw ParseError(0, "overlapping ramps on the same control");
      }
      prev = sc;
    }
  }
}

}  // namespace

Timeline parse_timeline(const std::string& text) {
  Timeline t;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_duration = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;

    if (tokens[0] == "duration") {
      if (tokens.size() < 2) throw ParseError(lineno, "duration needs a value");
      std::string v = tokens[1];
      for (size_t i = 2; i < tokens.size(); ++i) v += ' ' + tokens[i];
      t.duration = parse_value(v, lineno, "duration");
      have_duration = true;
    } else if (tokens[0] == "init") {
      if (tokens.size() != 3) throw ParseError(lineno, "init <FWC|BWC> <level>");
      const ControlField f = parse_field(tokens[1], lineno);
      const double level = parse_value(tokens[2], lineno, "level");
      if (level < 0 || level > 1) throw ParseError(lineno, "level outside [0, 1]");
      (f == ControlField::FWC ? t.init_fwc : t.init_bwc) = level;
    } else if (tokens[0] == "at") {
      if (tokens.size() < 3) throw ParseError(lineno, "incomplete event line");
      const double time = parse_value(tokens[1], lineno, "event time");
      if (have_duration && (time < 0 || time > t.duration)) {
        throw ParseError(lineno, "event time outside [0, duration]");
      }
      if (tokens[2] == "probe") {
        const auto kv = parse_kv(tokens, 3, lineno);
        ProbePulse p;
        p.t_center = time;
        for (const auto& [key, value] : kv) {
          if (key == "ch") p.channel = static_cast<int>(parse_value(value, lineno, "channel"));
          else if (key == "fwhm") p.fwhm = parse_value(value, lineno, "fwhm");
          else if (key == "amp") p.amplitude = parse_value(value, lineno, "amp");
          else throw ParseError(lineno, "unknown probe field '" + key + "'");
        }
        if (!kv.count("fwhm")) throw ParseError(lineno, "probe needs fwhm=");
        if (p.fwhm <= 0) throw ParseError(lineno, "fwhm must be positive");
        if (p.channel < 1) throw ParseError(lineno, "channel must be >= 1");
        t.events.emplace_back(p);
      } else if (tokens[2] == "set") {
        if (tokens.size() < 5) {
          throw ParseError(lineno, "set needs: at <t> set <FWC|BWC> <level> [ramp=<dur>]");
        }
        SetControl s;
        s.t_start = time;
        s.field = parse_field(tokens[3], lineno);
        s.level = parse_value(tokens[4], lineno, "level");
        if (s.level < 0 || s.level > 1) throw ParseError(lineno, "level outside [0, 1]");
        const auto kv = parse_kv(tokens, 5, lineno);
        for (const auto& [key, value] : kv) {
          if (key == "ramp") s.ramp = parse_value(value, lineno, "ramp");
          else throw ParseError(lineno, "unknown set field '" + key + "'");
        }
        if (s.ramp <= 0) throw ParseError(lineno, "ramp must be positive");
        t.events.emplace_back(s);
      } else {
        throw ParseError(lineno, "unknown event kind '" + tokens[2] + "'");
      }
    } else {
      throw ParseError(lineno, "unknown directive '" + tokens[0] + "'");
    }
  }
  std::stable_sort(t.events.begin(), t.events.end(),
                   [](const Event& a, const Event& b) {
                     return event_time(a) < event_time(b);
                   });
  if (!have_duration && !t.events.empty()) {
    throw ParseError(0, "non-empty timeline needs a duration directive");
  }
  validate_timeline(t);
  return t;
}

namespace {

// Prints a time so that parsing recovers the exact double: prefers "us",
// falls back to seconds.
std::string format_time(double seconds) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17gus", seconds * 1e6);
  if (parse_quantity(buf) == seconds) return buf;
  std::snprintf(buf, sizeof(buf), "%.17gs", seconds);
  return buf;
}

std::string format_plain(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string print_timeline(const Timeline& t) {
  std::ostringstream out;
  if (t.duration != 0 || !t.events.empty()) {
    out << "duration " << format_time(t.duration) << "\n";
  }
  if (t.init_fwc != 1.0) out << "init FWC " << format_plain(t.init_fwc) << "\n";
  if (t.init_bwc != 0.0) out << "init BWC " << format_plain(t.init_bwc) << "\n";
  for (const auto& e : t.events) {
    if (const auto* p = std::get_if<ProbePulse>(&e)) {
      out << "at " << format_time(p->t_center) << " probe ch=" << p->channel
          << " fwhm=" << format_time(p->fwhm)
          << " amp=" << format_plain(p->amplitude) << "\n";
    } else {
      const auto& s = std::get<SetControl>(e);
      out << "at " << format_time(s.t_start) << " set "
          << (s.field == ControlField::FWC ? "FWC" : "BWC") << " "
          << format_plain(s.level) << " ramp=" << format_time(s.ramp) << "\n";
    }
  }
  return out.str();
}

ControlWaveform::ControlWaveform(double nominal, double initial_level,
                                 std::vector<ControlTransition> transitions)
    : nominal_(nominal),
      initial_level_(initial_level),
      transitions_(std::move(transitions)) {}

double ControlWaveform::level(double t) const {
  double lvl = initial_level_;
  for (const auto& tr : transitions_) {
    if (t < tr.t_start) break;
    if (t >= tr.t_start + tr.ramp) {
      lvl = tr.to_level;
    } else {
      const double x = (t - tr.t_start) / tr.ramp;
      lvl = tr.from_level +
            (tr.to_level - tr.from_level) * 0.5 * (1.0 - std::cos(M_PI * x));
    }
  }
  return lvl;
}

double ControlWaveform::operator()(double t) const {
  return nominal_ * level(t);
}

double CompiledSequence::probe_amplitude(int channel, double t) const {
  double amp = 0;
  for (const auto& p : probes) {
    if (p.channel != channel) continue;
    // Intensity FWHM -> amplitude sigma.
    const double sigma = p.fwhm / (2.0 * std::sqrt(std::log(2.0)));
    const double x = t - p.t_center;
    if (std::abs(x) > 3.0 * sigma) continue;
    amp += p.amplitude * std::exp(-x * x / (2.0 * sigma * sigma));
  }
  return amp;
}

std::vector<int> CompiledSequence::probe_channels() const {
  std::vector<int> ids;
  for (const auto& p : probes) {
    if (std::find(ids.begin(), ids.end(), p.channel) == ids.end()) {
      ids.push_back(p.channel);
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

CompiledSequence compile(const Timeline& t,
                         const params::ControlParams& controls) {
  controls.validate();
  validate_timeline(t);

  std::vector<ControlTransition> fwc_tr, bwc_tr;
  double fwc_level = t.init_fwc;
  double bwc_level = t.init_bwc;
  std::vector<ProbePulse> probes;
  for (const auto& e : t.events) {
    if (const auto* p = std::get_if<ProbePulse>(&e)) {
      probes.push_back(*p);
      continue;
    }
    const auto& s = std::get<SetControl>(e);
    auto& list = s.field == ControlField::FWC ? fwc_tr : bwc_tr;
    double& level = s.field == ControlField::FWC ? fwc_level : bwc_level;
    if (!list.empty() &&
        s.t_start < list.back().t_start + list.back().ramp) {
      throw ParseError(0, "overlapping ramps on the same control");
    }
    list.push_back({s.t_start, s.ramp, level, s.level});
    level = s.level;
  }

  return CompiledSequence{
      t.duration,
      ControlWaveform(params::internal_rabi(controls.omega_fwc), t.init_fwc,
                      std::move(fwc_tr)),
      ControlWaveform(params::internal_rabi(controls.omega_bwc), t.init_bwc,
                      std::move(bwc_tr)),
      std::move(probes)};
}

namespace {

// Index of the final BWC turn-off following the last BWC turn-on.
size_t find_bwc_off(const Timeline& t) {
  ptrdiff_t on_idx = -1;
  for (size_t i = 0; i < t.events.size(); ++i) {
    const auto* s = std::get_if<SetControl>(&t.events[i]);
    if (s && s->field == ControlField::BWC && s->level > 0) on_idx = i;
  }
  if (on_idx < 0) throw std::invalid_argument("timeline has no BWC turn-on");
  for (size_t i = on_idx + 1; i < t.events.size(); ++i) {
    const auto* s = std::get_if<SetControl>(&t.events[i]);
    if (s && s->field == ControlField::BWC && s->level == 0) return i;
  }
  throw std::invalid_argument("timeline has no BWC turn-off after turn-on");
}

}  // namespace

Timeline with_trap_time(const Timeline& base, double trap_time) {
  Timeline t = base;
  const size_t off_idx = find_bwc_off(t);
  double on_time = 0;
  for (size_t i = 0; i < off_idx; ++i) {
    const auto* s = std::get_if<SetControl>(&t.events[i]);
    if (s && s->field == ControlField::BWC && s->level > 0) on_time = s->t_start;
  }
  if (trap_time < 0 || on_time + trap_time > t.duration) {
    throw std::invalid_argument(
        "with_trap_time: release time falls outside the timeline");
  }
  std::get<SetControl>(t.events[off_idx]).t_start = on_time + trap_time;
  std::stable_sort(t.events.begin(), t.events.end(),
                   [](const Event& a, const Event& b) {
                     return event_time(a) < event_time(b);
                   });
  validate_timeline(t);
  return t;
}

std::vector<Timeline> trap_time_sweep(const Timeline& base,
                                      const std::vector<double>& trap_times) {
  std::vector<Timeline> out;
  out.reserve(trap_times.size());
  for (double tt : trap_times) out.push_back(with_trap_time(base, tt));
  return out;
}

}  // namespace slp::sequence
