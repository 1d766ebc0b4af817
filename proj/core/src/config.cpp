#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include <fmt/format.h>

#include "isoflow/errors.hpp"
#include "isoflow/scenario.hpp"

namespace isoflow {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  s = trim(s);
  if (s.empty()) {
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty()) {
    throw ConfigError(fmt::format("{}: invalid number '{}'", key, value));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError(fmt::format("{}: expected a boolean, got '{}'", key, value));
}

FlowKind parse_flow(std::string_view key, std::string_view value) {
  const auto kind = parse_flow_kind(value);
  if (!kind) {
    throw ConfigError(fmt::format("{}: unknown flow '{}' (toda, ipm, diagflow, qr)", key, value));
  }
  return *kind;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += fmt::format("{}", values[i]);
  }
  return out;
}

std::string num(double x) { return fmt::format("{:.17g}", x); }

}  // namespace

double ScenarioConfig::h_for(FlowKind kind) const {
  const auto it = step_size.find(kind);
  return it != step_size.end() ? it->second : integrator.h;
}

void ScenarioConfig::validate() const {
  if (name.empty() || name.find('/') != std::string::npos) {
    throw ConfigError(fmt::format("name: invalid scenario name '{}'", name));
  }
  if (type == ScenarioType::kContinuum) {
    try {
      continuum.validate();
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    return;
  }
  if (n < 2) {
    throw ConfigError(fmt::format("n: must be >= 2, got {}", n));
  }
  if (flows.empty()) {
    throw ConfigError("flows: at least one flow is required");
  }
  for (const Index i : integrator.traced) {
    if (i < 0 || i >= n) {
      throw ConfigError(fmt::format("traced: index {} outside [0, {})", i, n));
    }
  }
  try {
    integrator.validate();
    for (const FlowKind kind : flows) {
      IntegratorConfig c = integrator;
      c.h = h_for(kind);
      c.validate();
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (raster.enabled && (raster.nlat < 2 || raster.nlon < 2 || raster.width < 1 || raster.height < 1)) {
    throw ConfigError("raster: invalid resolution");
  }
}

std::vector<Index> default_traced(Index n) {
  std::vector<Index> out;
  for (const Index i : {9, 49, 99, 149, 199}) {
    if (i < n) out.push_back(i);
  }
  return out;
}

void apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  auto& ic = cfg.integrator;
  auto& cc = cfg.continuum;
  if (key == "name") {
    cfg.name = std::string(value);
  } else if (key == "type") {
    if (value == "flow") cfg.type = ScenarioType::kFlow;
    else if (value == "continuum") cfg.type = ScenarioType::kContinuum;
    else throw ConfigError(fmt::format("type: expected flow or continuum, got '{}'", value));
  } else if (key == "n") {
    cfg.n = parse_number<Index>(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "input") {
    cfg.input = std::string(value);
  } else if (key == "flows") {
    cfg.flows.clear();
    for (const auto item : split_list(value)) cfg.flows.push_back(parse_flow(key, item));
  } else if (key == "h") {
    ic.h = parse_number<double>(key, value);
  } else if (key.starts_with("h.")) {
    cfg.step_size[parse_flow(key, key.substr(2))] = parse_number<double>(key, value);
  } else if (key == "fp_tol") {
    ic.fp_tol = parse_number<double>(key, value);
  } else if (key == "fp_maxit") {
    ic.fp_maxit = parse_number<int>(key, value);
  } else if (key == "steps") {
    ic.steps = parse_number<std::size_t>(key, value);
  } else if (key == "record_every") {
    ic.record_every = parse_number<std::size_t>(key, value);
  } else if (key == "stepper") {
    const auto s = parse_stepper(value);
    if (!s) throw ConfigError(fmt::format("stepper: expected isomp or rk4, got '{}'", value));
    ic.stepper = *s;
  } else if (key == "traced") {
    ic.traced.clear();
    for (const auto item : split_list(value)) ic.traced.push_back(parse_number<Index>(key, item));
  } else if (key == "output") {
    cfg.output = std::string(value);
  } else if (key == "raster") {
    cfg.raster.enabled = parse_bool(key, value);
  } else if (key == "raster.nlat") {
    cfg.raster.nlat = parse_number<Index>(key, value);
  } else if (key == "raster.nlon") {
    cfg.raster.nlon = parse_number<Index>(key, value);
  } else if (key == "raster.width") {
    cfg.raster.width = parse_number<int>(key, value);
  } else if (key == "raster.height") {
    cfg.raster.height = parse_number<int>(key, value);
  } else if (key == "raster.steps") {
    cfg.raster.steps.clear();
    for (const auto item : split_list(value)) {
      cfg.raster.steps.push_back(parse_number<std::size_t>(key, item));
    }
  } else if (key == "continuum.nodes") {
    cc.nodes = parse_number<Index>(key, value);
  } else if (key == "continuum.zmin") {
    cc.zmin = parse_number<double>(key, value);
  } else if (key == "continuum.zmax") {
    cc.zmax = parse_number<double>(key, value);
  } else if (key == "continuum.amplitude") {
    cc.amplitude = parse_number<double>(key, value);
  } else if (key == "continuum.width") {
    cc.width = parse_number<double>(key, value);
  } else if (key == "continuum.h") {
    cc.h = parse_number<double>(key, value);
  } else if (key == "continuum.t_end") {
    cc.t_end = parse_number<double>(key, value);
  } else if (key == "continuum.record_every") {
    cc.record_every = parse_number<std::size_t>(key, value);
  } else {
    throw ConfigError(fmt::format("unknown key '{}'", key));
  }
}

ScenarioConfig parse_config(std::istream& in) {
  ScenarioConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) {
      continue;
    }
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("line {}: expected key=value, got '{}'", lineno, view));
    }
    try {
      apply_setting(cfg, view.substr(0, eq), view.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", lineno, e.what()));
    }
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(fmt::format("cannot open config file {}", path.string()));
  }
  return parse_config(in);
}

std::string to_config_text(const ScenarioConfig& cfg) {
  const auto& ic = cfg.integrator;
  const auto& cc = cfg.continuum;
  std::ostringstream out;
  out << "name=" << cfg.name << '\n';
  out << "type=" << (cfg.type == ScenarioType::kFlow ? "flow" : "continuum") << '\n';
  out << "output=" << cfg.output.string() << '\n';
  if (cfg.type == ScenarioType::kFlow) {
    out << "n=" << cfg.n << '\n';
    out << "seed=" << cfg.seed << '\n';
    out << "input=" << cfg.input << '\n';
    std::vector<std::string_view> names;
    for (const FlowKind k : cfg.flows) names.push_back(to_string(k));
    out << "flows=" << join(names) << '\n';
    out << "h=" << num(ic.h) << '\n';
    for (const auto& [kind, h] : cfg.step_size) {
      out << "h." << to_string(kind) << '=' << num(h) << '\n';
    }
    out << "fp_tol=" << num(ic.fp_tol) << '\n';
    out << "fp_maxit=" << ic.fp_maxit << '\n';
    out << "steps=" << ic.steps << '\n';
    out << "record_every=" << ic.record_every << '\n';
    out << "stepper=" << to_string(ic.stepper) << '\n';
    out << "traced=" << join(ic.traced.empty() ? default_traced(cfg.n) : ic.traced) << '\n';
    out << "raster=" << (cfg.raster.enabled ? "true" : "false") << '\n';
    out << "raster.nlat=" << cfg.raster.nlat << '\n';
    out << "raster.nlon=" << cfg.raster.nlon << '\n';
    out << "raster.width=" << cfg.raster.width << '\n';
    out << "raster.height=" << cfg.raster.height << '\n';
    out << "raster.steps=" << join(cfg.raster.steps) << '\n';
  } else {
    out << "continuum.nodes=" << cc.nodes << '\n';
    out << "continuum.zmin=" << num(cc.zmin) << '\n';
    out << "continuum.zmax=" << num(cc.zmax) << '\n';
    out << "continuum.amplitude=" << num(cc.amplitude) << '\n';
    out << "continuum.width=" << num(cc.width) << '\n';
    out << "continuum.h=" << num(cc.h) << '\n';
    out << "continuum.t_end=" << num(cc.t_end) << '\n';
    out << "continuum.record_every=" << cc.record_every << '\n';
  }
  return out.str();
}

std::vector<std::string> preset_names() {
  return {"toda-vs-ipm-256", "diagflow-256", "continuum-smoke"};
}

ScenarioConfig preset(std::string_view name) {
  ScenarioConfig cfg;
  cfg.name = std::string(name);
  if (name == "toda-vs-ipm-256") {
    cfg.n = 256;
    cfg.seed = 1;
    cfg.flows = {FlowKind::kToda, FlowKind::kIpm};
    cfg.integrator.steps = 1500;
    cfg.integrator.record_every = 50;
    cfg.integrator.fp_tol = 1e-12;
    cfg.integrator.fp_maxit = 200;
    cfg.step_size[FlowKind::kToda] = 0.2;
    cfg.step_size[FlowKind::kIpm] = 3000.0;
    cfg.raster.enabled = true;
    cfg.raster.steps = {0, 500, 1000, 1500};
  } else if (name == "diagflow-256") {
    cfg.n = 256;
    cfg.seed = 1;
    cfg.flows = {FlowKind::kDiagFlow};
    cfg.integrator.steps = 1500;
    cfg.integrator.record_every = 50;
    cfg.integrator.fp_tol = 1e-12;
    cfg.integrator.fp_maxit = 200;
    cfg.step_size[FlowKind::kDiagFlow] = 2.0;
    cfg.raster.enabled = true;
    cfg.raster.steps = {0, 500, 1000, 1500};
  } else if (name == "continuum-smoke") {
    cfg.type = ScenarioType::kContinuum;
  } else {
    throw ConfigError(fmt::format("unknown preset '{}'", name));
  }
  return cfg;
}

}  // namespace isoflow
