#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "gurevich/io.hpp"

using gurevich::io::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = gurevich::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json result(const Run& r) {
  REQUIRE(r.code == 0);
  return json::parse(r.out).at("result");
}

std::string temp(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("entropy of the two-way path") {
  const auto r = result(run({"entropy", "--graph", "two-way-path", "--q", "100"}));
  CHECK(std::abs(r["h"].get<double>() - std::log(2.0)) <= 5e-3);
}

TEST_CASE("pressure on full:1000") {
  const auto r = result(run({"pressure", "--graph", "full:1000", "--potential", "neg-log-first", "--n-max", "30"}));
  CHECK(std::abs(r["estimate"].get<double>()) <= 0.02);
}

TEST_CASE("simulate gives admissible itineraries") {
  const auto r = run({"simulate", "--graph", "z-infinity", "--seed", "7", "--len", "64", "--samples", "100"});
  const auto res = result(r);
  CHECK(res["count"] == 100);
  CHECK(res["all_admissible"] == true);
  for (const auto& t : res["trajectories"]) {
    const auto g = gurevich::io::trajectory_from_json(t);
    CHECK(gurevich::trajectory::is_admissible(g.arcs()));
    CHECK(g.horizon() == 64);
  }
  CHECK(json::parse(r.out)["provenance"]["seed"] == 7);
}

TEST_CASE("CSV output round-trips") {
  const auto r = run({"simulate", "--seed", "3", "--len", "16", "--samples", "20", "--format", "csv"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.rfind("# ", 0) == 0);
  const auto body = r.out.substr(r.out.find('\n') + 1);
  const auto rows = gurevich::io::itineraries_from_csv(body);
  CHECK(rows.size() == 20);
  for (const auto& row : rows) CHECK(row.size() == 16);
}

TEST_CASE("identical configuration and seed give identical bytes") {
  const std::vector<std::string> args{"simulate", "--seed", "11", "--len", "32", "--samples", "50"};
  CHECK(run(args).out == run(args).out);
  const std::vector<std::string> dim{"dimension", "--q-schedule", "4", "--m-schedule", "2", "--n-max", "10",
                                     "--samples", "1000", "--seed", "5"};
  CHECK(run(dim).out == run(dim).out);
}

TEST_CASE("seed comes from the environment when not given") {
  setenv("GUREVICH_SEED", "42", 1);
  const auto a = run({"simulate", "--len", "8", "--samples", "5"});
  unsetenv("GUREVICH_SEED");
  CHECK(json::parse(a.out)["provenance"]["seed"] == 42);
  CHECK(a.out == run({"simulate", "--len", "8", "--samples", "5", "--seed", "42"}).out);
}

TEST_CASE("every subcommand produces a JSON document") {
  const std::vector<std::vector<std::string>> cases{
      {"classify", "--x-min", "-1", "--x-max", "1", "--step", "0.5"},
      {"entropy", "--graph", "z-infinity", "--q-schedule", "10,20"},
      {"pressure", "--graph", "full:3", "--q-schedule", "2"},
      {"recurrence", "--graph", "full:2", "--base", "1", "--n-max", "20"},
      {"mixing", "--m-max", "20"},
      {"dimension", "--q-schedule", "4", "--m-schedule", "1,2", "--n-max", "10"},
      {"export-graph", "--graph", "two-way-path", "--q", "4"},
  };
  for (const auto& args : cases) {
    const auto r = run(args);
    CAPTURE(args[0]);
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["provenance"]["tool"] == "gurevich");
    CHECK(doc["provenance"]["command"] == args[0]);
    CHECK(doc["provenance"]["version"] == gurevich::cli::kVersion);
  }
}

TEST_CASE("command results") {
  auto r = result(run({"classify", "--x-min", "0", "--x-max", "0.5", "--step", "0.5"}));
  CHECK(r["points"][0]["description"] == "two_fold(visible_visible)");
  CHECK(r["points"][1]["description"] == "two_fold(invisible_invisible)");

  r = result(run({"recurrence", "--graph", "full:2", "--base", "1", "--n-max", "20"}));
  CHECK(r["d_infinity"] == 0.0);
  CHECK(r["strongly_positive_recurrent"] == true);
  for (const auto& z : r["z_star"]) CHECK(z == 1);

  r = result(run({"mixing"}));
  CHECK(r["certificate"]["valid"] == true);
  CHECK(std::abs(r["theta"].get<double>() - 2 * std::sqrt(0.21)) <= 1e-3);
  CHECK(r["bound_dominates"] == true);

  r = result(run({"mixing", "--lambda", "0.9"}));
  CHECK(r["certificate"]["valid"] == false);
  CHECK(r["certificate"]["violations"] == 199);

  r = result(run({"export-graph", "--graph", "full:2"}));
  CHECK(r["truncation_edges"].size() == 4);
  const auto dot = run({"export-graph", "--graph", "full:2", "--format", "dot"});
  CHECK(dot.out.find("digraph") != std::string::npos);
}

TEST_CASE("kernel files drive recurrence sampling") {
  const auto path = temp("gurevich_cli_kernel.json");
  gurevich::io::write_file(path, gurevich::io::kernel_to_json(gurevich::markov::birth_death_chain(1000, 0.7, 0.3)).dump());
  const auto r = result(run({"recurrence", "--kernel", path, "--state", "0", "--horizon", "1000", "--samples", "500"}));
  CHECK(r["verdict"] == "transient");
  std::remove(path.c_str());
}

TEST_CASE("output files round-trip through the graph schema") {
  const auto path = temp("gurevich_cli_graph.json");
  REQUIRE(run({"export-graph", "--graph", "full:3", "--q", "2", "-o", path}).code == 0);
  const auto doc = json::parse(gurevich::io::read_file(path));
  const auto spec = gurevich::io::graph_from_json(doc["result"]);
  CHECK(spec.graph.size() == 3u);
  CHECK(spec.q == 2u);

  // A graph file is also a valid --graph argument.
  gurevich::io::write_file(path, doc["result"].dump());
  const auto r = result(run({"entropy", "--graph", path}));
  CHECK(std::abs(r["h"].get<double>() - std::log(3.0)) < 1e-9);
  std::remove(path.c_str());
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == gurevich::cli::config_error);
  CHECK(run({"nonsense"}).code == gurevich::cli::config_error);
  CHECK(run({"entropy", "--q", "abc"}).code == gurevich::cli::config_error);
  CHECK(run({"entropy", "--graph", "full:0"}).code == gurevich::cli::config_error);
  CHECK(run({"simulate", "--branching", "sideways"}).code == gurevich::cli::config_error);
  CHECK(run({"simulate", "--format", "xml"}).code == gurevich::cli::config_error);
  CHECK(run({"--help"}).code == gurevich::cli::ok);

  // A depth-3 potential is valid input the numeric code cannot handle.
  const auto path = temp("gurevich_cli_potential.json");
  gurevich::io::write_file(path, R"({"kind": "table", "depth": 3, "entries": {"0,0,0": 1.0, "0,0,1": 1.0,
    "0,1,0": 1.0, "0,1,1": 1.0, "1,0,0": 1.0, "1,0,1": 1.0, "1,1,0": 1.0, "1,1,1": 1.0}})");
  const auto r = run({"pressure", "--graph", "full:2", "--potential", path});
  CHECK(r.code == gurevich::cli::numeric_error);
  CHECK(r.err.find("numeric failure in thermo") != std::string::npos);
  std::remove(path.c_str());
}
