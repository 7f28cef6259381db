#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lrlattice/errors.hpp"
#include "scenario.hpp"

using namespace lrl;
using namespace lrl::cli;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "lrlattice_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> problems_of(const json& doc) {
  try {
    parse_scenario(doc);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

}  // namespace

TEST_CASE("defaults per command") {
  const Scenario k = parse_scenario({{"command", "kernel"}});
  CHECK(k.params.omega == 1.0);
  CHECK(k.t == std::vector<double>{1.0});
  CHECK(k.output == "kernel.csv");
  const Scenario c = parse_scenario({{"command", "cone"}});
  CHECK(c.params.omega == 0.0);
  CHECK(c.t.size() == 20);
  const Scenario j = parse_scenario({{"command", "bounds"}, {"format", "json"}});
  CHECK(j.format == OutputFormat::json);
  CHECK(j.output == "bounds.json");
  CHECK(j.window == 40);
}

TEST_CASE("strict schema collects every problem") {
  const auto p = problems_of({{"command", "kernel"}, {"x_max", 10}, {"d", 2}, {"lambda", {1.0}}, {"format", "xml"}});
  CHECK(p.size() >= 3);
  const auto has = [&](const std::string& needle) {
    return std::any_of(p.begin(), p.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
  };
  CHECK(has("x_max"));
  CHECK(has("lambda"));
  CHECK(has("format"));
  CHECK_FALSE(problems_of({{"command", "frobnicate"}}).empty());
  CHECK_FALSE(problems_of({{"command", "cone"}, {"threshold", 3.0}}).empty());
  CHECK_FALSE(problems_of({{"command", "fock-verify"}, {"cutoffs", {40, 20}}}).empty());
}

TEST_CASE("flag overrides take precedence over the file") {
  const auto path = scratch("scenario.json");
  {
    std::ofstream out(path);
    out << R"({"command": "kernel", "omega": 2.0, "t": [0.5]})";
  }
  const Scenario s = load_scenario(path.string(), {{"omega", 0.5}});
  CHECK(s.params.omega == 0.5);
  CHECK(s.t == std::vector<double>{0.5});
  CHECK_THROWS_AS(load_scenario(path.string(), {{"command", "cone"}}), ConfigError);
  CHECK_THROWS_AS(load_scenario((path.parent_path() / "missing.json").string(), json::object()), ConfigError);
}

TEST_CASE("kernel report at t = 0 is the delta at the origin") {
  Scenario s = parse_scenario({{"command", "kernel"}, {"t", {0.0}}, {"window", 2}});
  const Report r = run_scenario(s);
  CHECK_FALSE(r.violation);
  int origin_rows = 0;
  for (const auto& row : r.rows) {
    // columns: m, t, x_1, value, est_error
    const int m = row[0].get<int>();
    const int x = row[2].get<int>();
    const double v = row[3].get<double>();
    if (m == 0 && x == 0) {
      CHECK(v == 1.0);
      ++origin_rows;
    } else if (m == 0) {
      CHECK(std::abs(v) <= 1e-14);
    }
  }
  CHECK(origin_rows == 1);
}

TEST_CASE("report files and exit codes") {
  const auto out = scratch("kernel_out.csv");
  std::filesystem::remove(out);
  std::filesystem::remove(out.string() + ".summary.json");
  const std::string out_arg = out.string();
  {
    std::vector<std::string> args{"lrlattice", "kernel", "--t", "0.5", "--window", "3", "--output", out_arg};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    CHECK(run_cli(static_cast<int>(argv.size()), argv.data()) == 0);
  }
  CHECK(std::filesystem::exists(out));
  CHECK(std::filesystem::exists(out.string() + ".summary.json"));
  CHECK(slurp(out).rfind("m,t,x_1,value,est_error", 0) == 0);

  const auto bad = scratch("bad_out.csv");
  std::filesystem::remove(bad);
  {
    std::vector<std::string> args{"lrlattice", "kernel", "--d", "2", "--lambda", "1", "--output", bad.string()};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    CHECK(run_cli(static_cast<int>(argv.size()), argv.data()) == 2);
  }
  CHECK_FALSE(std::filesystem::exists(bad));
  CHECK_FALSE(std::filesystem::exists(bad.string() + ".summary.json"));
}
