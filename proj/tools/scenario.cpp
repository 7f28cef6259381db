#include "scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lrlattice/errors.hpp"
#include "lrlattice/lieb_robinson.hpp"

namespace lrl::cli {

namespace {

const std::map<std::string, Command>& command_table() {
  static const std::map<std::string, Command> table{
      {"kernel", Command::kernel}, {"cone", Command::cone},         {"bounds", Command::bounds},
      {"state", Command::state},   {"converge", Command::converge}, {"fock-verify", Command::fock_verify},
  };
  return table;
}

const std::set<std::string> kCommonKeys{"command", "d", "omega", "lambda", "t", "output", "format", "seed"};

std::set<std::string> allowed_keys(Command c) {
  std::set<std::string> keys = kCommonKeys;
  switch (c) {
    case Command::kernel:
      keys.insert({"window", "quad_points", "quad_tolerance"});
      break;
    case Command::cone:
      keys.insert({"x_max", "threshold", "probe", "mu", "epsilon", "a"});
      break;
    case Command::bounds:
      keys.insert({"window", "mu", "epsilon", "a", "quad_points", "quad_tolerance"});
      break;
    case Command::state:
      keys.insert({"L", "samples", "levels"});
      break;
    case Command::converge:
      keys.insert({"half_sides", "perturbation", "z", "weight", "a_grid", "window", "epsilon", "a"});
      break;
    case Command::fock_verify:
      keys.insert({"sites", "cutoffs", "samples", "label_norm"});
      break;
  }
  return keys;
}

// Collects type and range problems instead of stopping at the first.
class Reader {
 public:
  Reader(const nlohmann::json& doc, std::vector<std::string>& problems) : doc_(doc), problems_(problems) {}

  bool has(const std::string& key) const { return doc_.contains(key); }

  template <class T>
  T get(const std::string& key, T fallback) {
    if (!doc_.contains(key)) return fallback;
    try {
      return checked<T>(doc_.at(key), key);
    } catch (const std::exception&) {
      problems_.push_back("key '" + key + "': expected " + type_name<T>());
      return fallback;
    }
  }

 private:
  template <class T>
  static std::string type_name() {
    if constexpr (std::is_same_v<T, int>) return "an integer";
    else if constexpr (std::is_same_v<T, std::uint64_t>) return "a non-negative integer";
    else if constexpr (std::is_same_v<T, double>) return "a number";
    else if constexpr (std::is_same_v<T, std::string>) return "a string";
    else if constexpr (std::is_same_v<T, std::vector<double>>) return "an array of numbers";
    else return "an array of integers";
  }

  template <class T>
  static T checked(const nlohmann::json& v, const std::string& key) {
    if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) {
      if (!v.is_number_integer()) throw std::invalid_argument(key);
      if constexpr (std::is_same_v<T, std::uint64_t>) {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.get<std::int64_t>() < 0) throw std::invalid_argument(key);
      }
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw std::invalid_argument(key);
      return v.get<double>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw std::invalid_argument(key);
      return v.get<std::string>();
    } else {
      if (!v.is_array()) throw std::invalid_argument(key);
      T out;
      for (const auto& e : v) out.push_back(checked<typename T::value_type>(e, key));
      return out;
    }
  }

  const nlohmann::json& doc_;
  std::vector<std::string>& problems_;
};

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
  return out;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"kernel", "cone", "bounds", "state", "converge", "fock-verify"};
  return names;
}

std::string command_name(Command c) {
  for (const auto& [name, cmd] : command_table()) {
    if (cmd == c) return name;
  }
  return "?";
}

Scenario parse_scenario(const nlohmann::json& doc) {
  std::vector<std::string> problems;
  if (!doc.is_object()) throw ConfigError({"configuration must be a JSON object"});
  if (!doc.contains("command")) throw ConfigError({"missing required key 'command'"});
  if (!doc.at("command").is_string() || !command_table().count(doc.at("command").get<std::string>())) {
    std::string list;
    for (const auto& n : command_names()) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError({"key 'command': expected one of " + list});
  }

  Scenario s;
  s.command = command_table().at(doc.at("command").get<std::string>());
  const auto keys = allowed_keys(s.command);
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!keys.count(it.key())) {
      problems.push_back("unknown key '" + it.key() + "' for command '" + command_name(s.command) + "'");
    }
  }

  Reader r(doc, problems);
  const Command c = s.command;
  const int d = r.get<int>("d", 1);
  const bool dim_ok = d >= 1 && d <= kMaxDim;
  if (!dim_ok) problems.push_back("key 'd': dimension must lie in [1, " + std::to_string(kMaxDim) + "]");
  s.params.omega = r.get<double>("omega", c == Command::cone ? 0.0 : 1.0);
  s.params.lambda = r.get<std::vector<double>>("lambda", std::vector<double>(dim_ok ? d : 1, 1.0));
  if (dim_ok && static_cast<int>(s.params.lambda.size()) != d) {
    problems.push_back("key 'lambda': length " + std::to_string(s.params.lambda.size()) + " does not match d = " +
                       std::to_string(d));
  } else if (dim_ok) {
    try {
      s.params.validate();
    } catch (const std::exception& e) {
      problems.push_back(std::string("model: ") + e.what());
    }
  }

  std::vector<double> default_t{1.0};
  double default_a = 0.0;
  switch (c) {
    case Command::kernel:
      break;
    case Command::cone:
      default_t = linspace(1.0, 20.0, 20);
      default_a = 1.0;
      break;
    case Command::bounds:
      default_t = linspace(0.0, 2.0, 9);
      default_a = 0.25;
      break;
    case Command::state:
      default_t = {0.5, 1.0, 2.0};
      break;
    case Command::converge:
      default_t = {0.25, 0.5};
      default_a = 1.0;
      break;
    case Command::fock_verify:
      default_t = {0.25, 0.5, 1.0};
      break;
  }
  s.t = r.get<std::vector<double>>("t", default_t);
  if (s.t.empty()) problems.push_back("key 't': grid must not be empty");
  for (double t : s.t) {
    if (!std::isfinite(t)) problems.push_back("key 't': values must be finite");
  }

  const double eps = r.get<double>("epsilon", 1.0);
  const double a = r.get<double>("a", default_a);
  if (!(eps > 0.0)) problems.push_back("key 'epsilon': must be positive");
  if (!(a >= 0.0)) problems.push_back("key 'a': must be non-negative");
  if (dim_ok && eps > 0.0 && a >= 0.0) s.profile = DecayProfile(d, eps, a);

  s.window = r.get<int>("window", c == Command::bounds ? 40 : (c == Command::converge ? 64 : 32));
  if (s.window < 1) problems.push_back("key 'window': must be >= 1");
  s.quad_points = r.get<int>("quad_points", 16);
  s.quad_tolerance = r.get<double>("quad_tolerance", 1e-12);
  if (s.quad_points < 2 || s.quad_points % 2) problems.push_back("key 'quad_points': must be an even integer >= 2");
  if (!(s.quad_tolerance > 0.0)) problems.push_back("key 'quad_tolerance': must be positive");

  s.x_max = r.get<int>("x_max", 60);
  if (s.x_max < 1) problems.push_back("key 'x_max': must be >= 1");
  s.threshold = r.get<double>("threshold", 0.1);
  if (!(s.threshold > 0.0 && s.threshold < 2.0)) problems.push_back("key 'threshold': must lie in (0, 2)");
  s.probe = r.get<std::string>("probe", "position");
  if (s.probe != "position" && s.probe != "momentum") {
    problems.push_back("key 'probe': expected 'position' or 'momentum'");
  }

  s.mu = r.get<std::vector<double>>("mu", c == Command::bounds ? std::vector<double>{0.5, 1.0, 2.0} : kDefaultMuGrid);
  if (s.mu.empty()) problems.push_back("key 'mu': grid must not be empty");
  for (double mu : s.mu) {
    if (!(mu > 0.0)) problems.push_back("key 'mu': values must be positive");
  }
  if ((c == Command::cone || c == Command::bounds) && !s.mu.empty() &&
      *std::max_element(s.mu.begin(), s.mu.end()) <= a) {
    problems.push_back("key 'mu': at least one value must exceed the decay rate a");
  }
  s.a_grid = r.get<std::vector<double>>("a_grid", {});
  for (double v : s.a_grid) {
    if (!(v >= 0.0)) problems.push_back("key 'a_grid': values must be non-negative");
  }

  const int L = r.get<int>("L", 64);
  if (c == Command::state && L < 1) problems.push_back("key 'L': must be >= 1");
  s.samples = r.get<int>("samples", c == Command::state ? 50 : 3);
  if (s.samples < 1) problems.push_back("key 'samples': must be >= 1");
  s.levels = r.get<int>("levels", 8);
  if (s.levels < 2 || s.levels > 16) problems.push_back("key 'levels': must lie in [2, 16]");
  s.seed = r.get<std::uint64_t>("seed", 0);

  s.half_sides = r.get<std::vector<int>>("half_sides", {4, 8, 16, 32, 64});
  if (c == Command::converge) {
    if (s.half_sides.size() < 2) problems.push_back("key 'half_sides': need at least two volumes");
    for (std::size_t i = 0; i < s.half_sides.size(); ++i) {
      if (s.half_sides[i] < 1 || (i && s.half_sides[i] <= s.half_sides[i - 1])) {
        problems.push_back("key 'half_sides': must be positive and strictly increasing");
        break;
      }
    }
  }
  if (r.has("perturbation")) {
    s.perturbation_path = r.get<std::string>("perturbation", "");
    if (s.perturbation_path->empty()) problems.push_back("key 'perturbation': path must not be empty");
    if (r.has("z") || r.has("weight")) problems.push_back("keys 'z'/'weight' conflict with 'perturbation'");
  }
  const auto z = r.get<std::vector<double>>("z", {0.2, 0.0});
  if (z.size() != 2) {
    problems.push_back("key 'z': expected [re, im]");
  } else {
    s.z = cplx(z[0], z[1]);
  }
  s.weight = r.get<double>("weight", 1.0);
  if (!(s.weight > 0.0)) problems.push_back("key 'weight': must be positive");

  s.sites = r.get<int>("sites", 2);
  if (c == Command::fock_verify && (s.sites != 2)) {
    problems.push_back("key 'sites': the torus comparison needs an even ring within the 3-site limit, i.e. 2");
  }
  s.cutoffs = r.get<std::vector<int>>("cutoffs", {20, 40, 60});
  if (s.cutoffs.empty()) problems.push_back("key 'cutoffs': grid must not be empty");
  for (std::size_t i = 0; i < s.cutoffs.size(); ++i) {
    if (s.cutoffs[i] < 6 || (i && s.cutoffs[i] <= s.cutoffs[i - 1])) {
      problems.push_back("key 'cutoffs': must be >= 6 and strictly increasing");
      break;
    }
  }
  s.label_norm = r.get<double>("label_norm", 0.5);
  if (!(s.label_norm > 0.0)) problems.push_back("key 'label_norm': must be positive");

  if (dim_ok) {
    if (c == Command::state) {
      s.geometry = LatticeGeometry::torus(d, std::max(L, 1));
    } else if (c == Command::fock_verify) {
      if (d != 1) problems.push_back("key 'd': fock-verify works on a one-dimensional ring");
      s.geometry = LatticeGeometry::torus(1, 1);
    } else {
      s.geometry = LatticeGeometry::infinite(d, 1);
    }
  }

  const std::string fmt = r.get<std::string>("format", "csv");
  if (fmt == "csv") {
    s.format = OutputFormat::csv;
  } else if (fmt == "json") {
    s.format = OutputFormat::json;
  } else {
    problems.push_back("key 'format': expected 'csv' or 'json'");
  }
  s.output = r.get<std::string>("output", command_name(c) + (fmt == "json" ? ".json" : ".csv"));
  if (s.output.empty()) {
    problems.push_back("key 'output': path must not be empty");
  } else {
    const auto parent = std::filesystem::path(s.output).parent_path();
    if (!parent.empty() && !std::filesystem::is_directory(parent)) {
      problems.push_back("key 'output': directory '" + parent.string() + "' does not exist");
    }
  }

  if (!problems.empty()) throw ConfigError(problems);
  return s;
}

Scenario load_scenario(const std::string& config_path, const nlohmann::json& overrides) {
  nlohmann::json doc = nlohmann::json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError({"cannot read config file '" + config_path + "'"});
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError({"config file '" + config_path + "' is not valid JSON: " + e.what()});
    }
    if (!doc.is_object()) throw ConfigError({"config file '" + config_path + "' must hold a JSON object"});
  }
  if (doc.contains("command") && overrides.contains("command") && doc.at("command") != overrides.at("command")) {
    throw ConfigError({"subcommand '" + overrides.at("command").get<std::string>() +
                       "' does not match config command " + doc.at("command").dump()});
  }
  for (auto it = overrides.begin(); it != overrides.end(); ++it) doc[it.key()] = it.value();
  return parse_scenario(doc);
}

}  // namespace lrl::cli
