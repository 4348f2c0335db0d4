#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dascof/experiments.hpp"

#ifndef DASCOF_BUILD_ID
#define DASCOF_BUILD_ID "untracked"
#endif

namespace dascof {

const char* build_id() { return DASCOF_BUILD_ID; }

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string item; std::getline(is, item, sep);) out.push_back(trim(item));
  return out;
}

class KeyValues {
 public:
  void insert(const std::string& key, const std::string& value) { values_[key] = value; }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string str(const std::string& key, const std::string& fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    seen_.insert(it->first);
    return it->second;
  }

  std::string require(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(key + ": required key is missing");
    seen_.insert(it->first);
    return it->second;
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return parse_number(key, str(key, ""));
  }

  long long integer(const std::string& key, long long fallback) {
    if (!has(key)) return fallback;
    const std::string raw = str(key, "");
    try {
      std::size_t used = 0;
      const long long v = std::stoll(raw, &used);
      if (used != raw.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(key + ": expected an integer, got '" + raw + "'");
    }
  }

  double parse_number(const std::string& key, const std::string& raw) const {
    if (raw == "inf") return std::numeric_limits<double>::infinity();
    try {
      std::size_t used = 0;
      const double v = std::stod(raw, &used);
      if (used != raw.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(key + ": expected a number, got '" + raw + "'");
    }
  }

  void check_all_consumed() const {
    for (const auto& [key, value] : values_)
      if (seen_.count(key) == 0) throw ConfigError(key + ": unknown key");
  }

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> seen_;
};

GammaSpec parse_gamma(const std::string& raw, GammaSpec::Draw draw) {
  try {
    if (raw.rfind("fixed:", 0) == 0) return GammaSpec::fixed(std::stod(raw.substr(6)));
    if (raw.rfind("uniform:", 0) == 0) {
      const auto parts = split(raw.substr(8), ',');
      if (parts.size() != 2) throw std::invalid_argument("need lo,hi");
      return GammaSpec::uniform(std::stod(parts[0]), std::stod(parts[1]), draw);
    }
    return GammaSpec::fixed(std::stod(raw));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("channel.gamma: expected 'fixed:v' or 'uniform:lo,hi', got '" + raw + "' (" +
                      e.what() + ")");
  }
}

}  // namespace

ExperimentSpec parse_config_text(const std::string& text) {
  KeyValues kv;
  std::istringstream is(text);
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "experiment" && section != "channel" && section != "output")
        throw ConfigError("unknown section '[" + section + "]'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key outside any [section]");
    kv.insert(section + "." + trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }

  ExperimentSpec spec;
  for (const std::string& name : split(kv.require("experiment.schemes"), ',')) {
    if (name.empty()) throw ConfigError("experiment.schemes: empty scheme name");
    spec.schemes.push_back(scheme_from_name(name));
  }
  {
    const std::string axis = kv.str("experiment.axis", "r0");
    if (axis == "r0")
      spec.axis = ExperimentSpec::Axis::r0;
    else if (axis == "snr")
      spec.axis = ExperimentSpec::Axis::snr;
    else
      throw ConfigError("experiment.axis: expected 'r0' or 'snr', got '" + axis + "'");
  }
  for (const std::string& v : split(kv.require("experiment.grid"), ','))
    spec.grid.push_back(kv.parse_number("experiment.grid", v));
  spec.p = static_cast<std::uint64_t>(kv.integer("experiment.p", 251));
  spec.trials = static_cast<Eigen::Index>(kv.integer("experiment.trials", 100));
  spec.seed = static_cast<std::uint64_t>(kv.integer("experiment.seed", 1));
  {
    const std::string sel = kv.str("experiment.selection", "none");
    if (sel == "none")
      spec.selection = SelectionMode::none;
    else if (sel == "random")
      spec.selection = SelectionMode::random;
    else if (sel == "greedy")
      spec.selection = SelectionMode::greedy;
    else
      throw ConfigError("experiment.selection: expected none|random|greedy, got '" + sel + "'");
  }

  {
    const std::string model = kv.str("channel.model", "soft_handoff");
    if (model == "soft_handoff")
      spec.model = ChannelModel::soft_handoff;
    else if (model == "rayleigh")
      spec.model = ChannelModel::rayleigh;
    else
      throw ConfigError("channel.model: expected soft_handoff|rayleigh, got '" + model + "'");
  }
  spec.num_cells = static_cast<Eigen::Index>(kv.integer("channel.L", 1));
  spec.num_users = static_cast<Eigen::Index>(kv.integer("channel.K", spec.num_cells));
  {
    GammaSpec::Draw draw = GammaSpec::Draw::per_entry;
    const std::string d = kv.str("channel.gamma_draw", "per_entry");
    if (d == "per_entry")
      draw = GammaSpec::Draw::per_entry;
    else if (d == "per_trial")
      draw = GammaSpec::Draw::per_trial;
    else
      throw ConfigError("channel.gamma_draw: expected per_entry|per_trial, got '" + d + "'");
    if (kv.has("channel.gamma")) spec.gamma = parse_gamma(kv.str("channel.gamma", ""), draw);
  }
  spec.snr_db = kv.number("channel.snr_db", 20.0);
  spec.r0 = kv.number("channel.r0", std::numeric_limits<double>::infinity());
  spec.out_path = kv.str("output.path", "");

  kv.check_all_consumed();
  spec.validate();
  return spec;
}

ExperimentSpec load_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("config file '" + path + "' cannot be opened");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_config_text(buffer.str());
}

namespace {

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

// The rendered manifest is itself a valid config file, so a CSV header can be
// replayed directly.
std::string render_config(const ExperimentSpec& spec) {
  std::ostringstream os;
  os << "[experiment]\n";
  os << "schemes = ";
  for (std::size_t i = 0; i < spec.schemes.size(); ++i)
    os << (i ? "," : "") << scheme_name(spec.schemes[i]);
  os << "\n";
  os << "axis = " << (spec.axis == ExperimentSpec::Axis::r0 ? "r0" : "snr") << "\n";
  os << "grid = ";
  for (std::size_t i = 0; i < spec.grid.size(); ++i) os << (i ? "," : "") << format_number(spec.grid[i]);
  os << "\n";
  os << "p = " << spec.p << "\n";
  os << "trials = " << spec.trials << "\n";
  os << "seed = " << spec.seed << "\n";
  os << "selection = " << selection_name(spec.selection) << "\n";
  os << "[channel]\n";
  os << "model = " << channel_model_name(spec.model) << "\n";
  os << "L = " << spec.num_cells << "\n";
  os << "K = " << spec.num_users << "\n";
  if (spec.gamma.kind == GammaSpec::Kind::fixed) {
    os << "gamma = fixed:" << format_number(spec.gamma.value) << "\n";
  } else {
    os << "gamma = uniform:" << format_number(spec.gamma.lo) << ","
       << format_number(spec.gamma.hi) << "\n";
    os << "gamma_draw = "
       << (spec.gamma.draw == GammaSpec::Draw::per_entry ? "per_entry" : "per_trial") << "\n";
  }
  os << "snr_db = " << format_number(spec.snr_db) << "\n";
  os << "r0 = " << format_number(spec.r0) << "\n";
  if (!spec.out_path.empty()) {
    os << "[output]\n";
    os << "path = " << spec.out_path << "\n";
  }
  return os.str();
}

}  // namespace dascof
