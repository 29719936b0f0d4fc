#include "dsa/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "dsa/likelihood.hpp"

namespace dsa {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::filesystem::filesystem_error(
        "cannot open", path, std::make_error_code(std::errc::no_such_file_or_directory));
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    throw std::filesystem::filesystem_error(
        "cannot write", path, std::make_error_code(std::errc::permission_denied));
  return out;
}

double parse_num(const std::string& tok, long line) {
  double v;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw ParseError("bad number '" + tok + "'", line);
  return v;
}

long long parse_int(const std::string& tok, long line) {
  long long v;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw ParseError("bad integer '" + tok + "'", line);
  return v;
}

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

CountData parse_counts_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  CountData data;
  data.schedule.push_back(0.0);
  std::string line;
  long lineno = 0;
  bool header_seen = false;
  double declared_t = -1;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = strip(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      std::string meta = strip(s.substr(1));
      auto eq = meta.find('=');
      if (eq == std::string::npos) continue;  // free-form comment
      std::string key = strip(meta.substr(0, eq));
      std::string val = strip(meta.substr(eq + 1));
      if (key == "N")
        data.n = parse_int(val, lineno);
      else if (key == "M")
        data.m = parse_int(val, lineno);
      else if (key == "T")
        declared_t = parse_num(val, lineno);
      continue;
    }
    if (!header_seen) {
      if (s != "interval_end,count")
        throw ParseError("expected header 'interval_end,count'", lineno);
      header_seen = true;
      continue;
    }
    auto comma = s.find(',');
    if (comma == std::string::npos) throw ParseError("expected 'interval_end,count' row", lineno);
    double x = parse_num(strip(s.substr(0, comma)), lineno);
    long long y = parse_int(strip(s.substr(comma + 1)), lineno);
    if (!(x > data.schedule.back()))
      throw ParseError("interval ends must be strictly increasing", lineno);
    if (y < 0) throw ParseError("counts must be nonnegative", lineno);
    data.schedule.push_back(x);
    data.counts.push_back(y);
  }
  if (!header_seen) throw ParseError("missing header 'interval_end,count'", lineno);
  if (data.counts.empty()) throw ParseError("no data rows", lineno);
  if (declared_t >= 0) {
    if (std::abs(declared_t - data.schedule.back()) > 1e-9 * std::max(1.0, declared_t))
      throw ParseError("declared T does not match the last interval end");
  }
  try {
    data.validate();
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  return data;
}

void write_counts_csv(const std::filesystem::path& path, const CountData& data) {
  data.validate();
  auto out = open_out(path);
  if (data.n) out << "# N=" << *data.n << "\n";
  if (data.m) out << "# M=" << *data.m << "\n";
  out << "# T=" << format_double(data.horizon()) << "\n";
  out << "interval_end,count\n";
  for (std::size_t j = 0; j < data.counts.size(); ++j)
    out << format_double(data.schedule[j + 1]) << "," << data.counts[j] << "\n";
}

EventRecord parse_events_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  EventRecord ev;
  try {
    ev.n = j.at("n").get<long long>();
    ev.m = j.at("m").get<long long>();
    ev.horizon = j.at("horizon").get<double>();
    ev.infection_times = j.at("infection_times").get<std::vector<double>>();
    for (const auto& p : j.at("periods")) {
      InfectiousPeriod ip;
      ip.duration = p.at("duration").get<double>();
      ip.censored = p.at("censored").get<bool>();
      ev.periods.push_back(ip);
    }
    ev.initial_recoveries = j.at("initial_recoveries").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad event record: ") + e.what());
  }
  try {
    ev.validate();
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  return ev;
}

void write_events_json(const std::filesystem::path& path, const EventRecord& events) {
  events.validate();
  nlohmann::json j;
  j["n"] = events.n;
  j["m"] = events.m;
  j["horizon"] = events.horizon;
  j["infection_times"] = events.infection_times;
  j["periods"] = nlohmann::json::array();
  for (const auto& p : events.periods)
    j["periods"].push_back({{"duration", p.duration}, {"censored", p.censored}});
  j["initial_recoveries"] = events.initial_recoveries;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_draws_csv(const std::filesystem::path& path, const std::vector<Chain>& chains) {
  if (chains.empty()) throw DomainError("no chains to write");
  const auto& sampled = chains.front().layout.sampled;
  auto out = open_out(path);
  out << "chain";
  for (ParamId id : sampled) out << "," << param_name(id);
  out << ",log_posterior\n";
  for (std::size_t c = 0; c < chains.size(); ++c) {
    const Chain& ch = chains[c];
    if (ch.layout.sampled != sampled) throw ConfigError("chains have different layouts");
    for (std::size_t i = static_cast<std::size_t>(ch.burn_in); i < ch.draws.size(); ++i) {
      out << c;
      const ModelParams& p = ch.draws[i];
      for (ParamId id : sampled) {
        double v = 0;
        switch (id) {
          case ParamId::Beta: v = p.beta; break;
          case ParamId::Gamma: v = p.gamma; break;
          case ParamId::Rho: v = p.rho; break;
          case ParamId::Nu: v = p.nu; break;
        }
        out << "," << format_double(v);
      }
      out << "," << format_double(ch.log_post[i]) << "\n";
    }
  }
}

void write_density_csv(const std::filesystem::path& path, const Trajectory& traj,
                       const ModelParams& params, double horizon, int n_points) {
  if (n_points < 2) throw DomainError("need at least two density points");
  auto out = open_out(path);
  out << "t,density\n";
  for (int k = 0; k < n_points; ++k) {
    double t = horizon * static_cast<double>(k) / (n_points - 1);
    double f = density_infection(traj, params, t, horizon);
    out << format_double(t) << "," << format_double(f) << "\n";
  }
}

namespace {

nlohmann::json param_json(const ParamSummary& p) {
  return {{"name", param_name(p.id)}, {"mean", p.mean},        {"sd", p.sd},
          {"ci_lo", p.ci_lo},         {"ci_hi", p.ci_hi},      {"ess", p.ess},
          {"ess_per_sec", p.ess_per_sec}};
}

}  // namespace

std::string summary_to_json(const PosteriorSummary& summary,
                            const std::vector<std::pair<std::string, std::string>>& extra) {
  nlohmann::json j;
  j["ci_level"] = summary.ci_level;
  j["n_retained"] = summary.n_retained;
  j["wall_seconds"] = summary.wall_seconds;
  j["mean_log_posterior"] = summary.mean_log_post;
  j["params"] = nlohmann::json::array();
  for (const auto& p : summary.params) j["params"].push_back(param_json(p));
  for (const auto& [k, v] : extra) {
    nlohmann::json parsed = nlohmann::json::parse(v, nullptr, false);
    j[k] = parsed.is_discarded() ? nlohmann::json(v) : parsed;
  }
  return j.dump(2) + "\n";
}

std::string coverage_to_json(const CoverageReport& report) {
  nlohmann::json j;
  j["replicates"] = report.replicates;
  j["completed"] = report.completed;
  j["seed"] = report.seed;
  j["wall_seconds"] = report.wall_seconds;
  j["params"] = nlohmann::json::array();
  for (const auto& e : report.params)
    j["params"].push_back({{"name", param_name(e.id)},
                           {"truth", e.truth},
                           {"coverage", e.coverage},
                           {"mean_post_mean", e.mean_post_mean},
                           {"mean_post_sd", e.mean_post_sd},
                           {"mean_ess_per_sec", e.mean_ess_per_sec}});
  return j.dump(2) + "\n";
}

namespace {

std::string fixed_width(const std::string& s, std::size_t w) {
  if (s.size() >= w) return s + " ";
  return s + std::string(w - s.size(), ' ');
}

std::string round_str(double v, int digits) {
  std::ostringstream os;
  os.precision(digits);
  os << std::fixed << v;
  return os.str();
}

}  // namespace

std::string summary_table(const PosteriorSummary& summary) {
  std::ostringstream os;
  int pct = static_cast<int>(std::lround(summary.ci_level * 100));
  os << fixed_width("param", 8) << fixed_width("mean", 10) << fixed_width("sd", 10)
     << fixed_width(std::to_string(pct) + "% lo", 10)
     << fixed_width(std::to_string(pct) + "% hi", 10) << fixed_width("ESS", 10) << "ESS/s\n";
  for (const auto& p : summary.params) {
    os << fixed_width(param_name(p.id), 8) << fixed_width(round_str(p.mean, 4), 10)
       << fixed_width(round_str(p.sd, 4), 10) << fixed_width(round_str(p.ci_lo, 4), 10)
       << fixed_width(round_str(p.ci_hi, 4), 10) << fixed_width(round_str(p.ess, 1), 10)
       << round_str(p.ess_per_sec, 1) << "\n";
  }
  return os.str();
}

std::string coverage_table(const CoverageReport& report) {
  std::ostringstream os;
  os << "replicates: " << report.completed << "/" << report.replicates << " completed\n";
  os << fixed_width("param", 8) << fixed_width("truth", 10) << fixed_width("avg", 10)
     << fixed_width("sd", 10) << fixed_width("coverage", 10) << "ESS/s\n";
  for (const auto& e : report.params) {
    os << fixed_width(param_name(e.id), 8) << fixed_width(round_str(e.truth, 4), 10)
       << fixed_width(round_str(e.mean_post_mean, 4), 10)
       << fixed_width(round_str(e.mean_post_sd, 4), 10)
       << fixed_width(round_str(e.coverage, 2), 10) << round_str(e.mean_ess_per_sec, 1) << "\n";
  }
  return os.str();
}

}  // namespace dsa
