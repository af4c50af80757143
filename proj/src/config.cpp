#include "krgg/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace krgg {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  v = trim(v);
  if (!v.empty() && v.front() == '[' && v.back() == ']') v = trim(v.substr(1, v.size() - 2));
  if (v.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = v.find(',', start);
    out.push_back(trim(v.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view key, std::string_view v) {
  v = trim(v);
  T out{};
  if constexpr (std::is_floating_point_v<T>) {
    // from_chars for double is missing from older libstdc++; strtod is exact.
    std::string s(v);
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
      throw ConfigError(std::string(key), "invalid number for '" + std::string(key) + "': " + s);
    }
  } else {
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw ConfigError(std::string(key),
                        "invalid integer for '" + std::string(key) + "': " + std::string(v));
    }
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  v = trim(v);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(std::string(key), "invalid boolean for '" + std::string(key) + "': " + std::string(v));
}

template <class T>
std::vector<T> parse_list(std::string_view key, std::string_view v) {
  std::vector<T> out;
  for (auto item : split_list(v)) out.push_back(parse_number<T>(key, item));
  return out;
}

std::string json_scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

}  // namespace

void apply_setting(CampaignConfig& cfg, std::string_view key, std::string_view value) {
  const std::string k(key);
  try {
    if (k == "mode") {
      cfg.mode = campaign_mode_from_string(trim(value));
    } else if (k == "n") {
      cfg.n_values = parse_list<std::size_t>(k, value);
    } else if (k == "eps_power") {
      cfg.epsilon_rule = EpsilonRule::with_power(parse_number<double>(k, value));
    } else if (k == "eps") {
      cfg.epsilon_rule = EpsilonRule::with_values(parse_list<double>(k, value));
    } else if (k == "q") {
      cfg.q_values = parse_list<int>(k, value);
    } else if (k == "trials") {
      cfg.trials_per_cell = parse_number<int>(k, value);
    } else if (k == "seed") {
      cfg.master_seed = parse_number<std::uint64_t>(k, value);
    } else if (k == "workers") {
      cfg.workers = parse_number<int>(k, value);
    } else if (k == "variant") {
      cfg.graph.variant = variant_from_string(trim(value));
    } else if (k == "graph_epsilon") {
      cfg.graph.epsilon = parse_number<double>(k, value);
    } else if (k == "k") {
      cfg.graph.k = parse_number<int>(k, value);
    } else if (k == "rho") {
      cfg.graph.radius.rho = parse_number<double>(k, value);
    } else if (k == "count_law") {
      const auto v = trim(value);
      if (v == "constant") {
        cfg.graph.count.kind = CountLaw::Kind::constant;
      } else if (v == "uniform") {
        cfg.graph.count.kind = CountLaw::Kind::uniform_int;
      } else {
        throw ConfigError(k, "invalid count_law: " + std::string(v));
      }
    } else if (k == "count_lo") {
      cfg.graph.count.lo = parse_number<int>(k, value);
    } else if (k == "count_hi") {
      cfg.graph.count.hi = parse_number<int>(k, value);
    } else if (k == "kernel") {
      cfg.graph.kernel = Kernel::from_name(trim(value));
    } else if (k == "sampling") {
      cfg.sampling = sampling_mode_from_string(trim(value));
    } else if (k == "skip_disconnected") {
      cfg.skip_disconnected = parse_bool(k, value);
    } else if (k == "restart_probe") {
      cfg.restart_probe = parse_bool(k, value);
    } else if (k == "compute_eigenvalue") {
      cfg.flow.compute_eigenvalue = parse_bool(k, value);
    } else if (k == "fourier_cos") {
      cfg.test_function.cos_coeffs = parse_list<double>(k, value);
    } else if (k == "fourier_sin") {
      cfg.test_function.sin_coeffs = parse_list<double>(k, value);
    } else if (k == "grad_tol") {
      cfg.flow.grad_tol = parse_number<double>(k, value);
    } else if (k == "max_steps") {
      cfg.flow.max_steps = parse_number<long>(k, value);
    } else if (k == "max_time") {
      cfg.flow.max_time = parse_number<double>(k, value);
    } else if (k == "dt_init") {
      cfg.flow.dt_init = parse_number<double>(k, value);
    } else if (k == "dt_max") {
      cfg.flow.dt_max = parse_number<double>(k, value);
    } else if (k == "safety") {
      cfg.flow.safety = parse_number<double>(k, value);
    } else if (k == "rtol") {
      cfg.flow.rtol = parse_number<double>(k, value);
    } else if (k == "atol") {
      cfg.flow.atol = parse_number<double>(k, value);
    } else if (k == "antipodal_tol") {
      cfg.flow.antipodal_tol = parse_number<double>(k, value);
    } else if (k == "eigen_tol") {
      cfg.flow.eigen_tol = parse_number<double>(k, value);
    } else if (k == "eigen_max_iterations") {
      cfg.flow.eigen_max_iterations = parse_number<int>(k, value);
    } else {
      throw ConfigError(k, "unknown configuration key '" + k + "'");
    }
  } catch (const DomainError& e) {
    throw ConfigError(k, "invalid value for '" + k + "': " + e.what());
  }
}

CampaignConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("", "configuration must be a flat JSON object");
  CampaignConfig cfg;
  bool saw_power = false;
  bool saw_list = false;
  for (const auto& [key, v] : j.items()) {
    saw_power = saw_power || key == "eps_power";
    saw_list = saw_list || key == "eps";
    if (v.is_array()) {
      std::string joined;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) joined += ',';
        joined += json_scalar_text(v[i]);
      }
      apply_setting(cfg, key, joined);
    } else if (v.is_object()) {
      throw ConfigError(key, "nested value for '" + key + "' (configuration is flat)");
    } else {
      apply_setting(cfg, key, json_scalar_text(v));
    }
  }
  if (saw_power && saw_list) throw ConfigError("eps", "both 'eps' and 'eps_power' given");
  return cfg;
}

CampaignConfig parse_config_text(std::string_view text) {
  const auto body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("", std::string("malformed JSON configuration: ") + e.what());
    }
    return config_from_json(j);
  }
  CampaignConfig cfg;
  bool saw_power = false;
  bool saw_list = false;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view l = line;
    if (const auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
    l = trim(l);
    if (l.empty()) continue;
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const auto key = trim(l.substr(0, eq));
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError(std::string(key), "line " + std::to_string(lineno) + ": duplicate key '" +
                                              std::string(key) + "'");
    }
    saw_power = saw_power || key == "eps_power";
    saw_list = saw_list || key == "eps";
    apply_setting(cfg, key, trim(l.substr(eq + 1)));
  }
  if (saw_power && saw_list) throw ConfigError("eps", "both 'eps' and 'eps_power' given");
  return cfg;
}

CampaignConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read configuration file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

nlohmann::ordered_json config_to_json(const CampaignConfig& cfg) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(cfg.mode);
  j["n"] = cfg.n_values;
  if (cfg.epsilon_rule.kind == EpsilonRule::Kind::power) {
    j["eps_power"] = cfg.epsilon_rule.power;
  } else {
    j["eps"] = cfg.epsilon_rule.values;
  }
  j["q"] = cfg.q_values;
  j["trials"] = cfg.trials_per_cell;
  j["seed"] = cfg.master_seed;
  j["workers"] = cfg.workers;
  j["variant"] = to_string(cfg.graph.variant);
  if (cfg.graph.epsilon != 0.0) j["graph_epsilon"] = cfg.graph.epsilon;
  j["k"] = cfg.graph.k;
  j["rho"] = cfg.graph.radius.rho;
  j["count_law"] = cfg.graph.count.kind == CountLaw::Kind::constant ? "constant" : "uniform";
  j["count_lo"] = cfg.graph.count.lo;
  j["count_hi"] = cfg.graph.count.hi;
  j["kernel"] = cfg.graph.kernel.name();
  j["sampling"] = to_string(cfg.sampling);
  j["skip_disconnected"] = cfg.skip_disconnected;
  j["restart_probe"] = cfg.restart_probe;
  j["fourier_cos"] = cfg.test_function.cos_coeffs;
  j["fourier_sin"] = cfg.test_function.sin_coeffs;
  j["grad_tol"] = cfg.flow.grad_tol;
  j["max_steps"] = cfg.flow.max_steps;
  j["max_time"] = cfg.flow.max_time;
  j["dt_init"] = cfg.flow.dt_init;
  j["dt_max"] = cfg.flow.dt_max;
  j["safety"] = cfg.flow.safety;
  j["rtol"] = cfg.flow.rtol;
  j["atol"] = cfg.flow.atol;
  j["antipodal_tol"] = cfg.flow.antipodal_tol;
  j["compute_eigenvalue"] = cfg.flow.compute_eigenvalue;
  j["eigen_tol"] = cfg.flow.eigen_tol;
  j["eigen_max_iterations"] = cfg.flow.eigen_max_iterations;
  return j;
}

}  // namespace krgg
