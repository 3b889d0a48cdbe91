#pragma once

// JSON, CSV and DOT interchange formats.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gurevich/markov.hpp"
#include "gurevich/shift.hpp"
#include "gurevich/thermo.hpp"
#include "gurevich/trajectory.hpp"

namespace gurevich::io {

using json = nlohmann::json;

struct GraphSpec {
  shift::CountableGraph graph;
  std::optional<std::uint64_t> q;
};

/// z-infinity | two-way-path | full:N | path to a graph JSON file.
GraphSpec parse_graph_spec(const std::string& spec);

json graph_to_json(const shift::CountableGraph& g, std::optional<std::uint64_t> q = {});
GraphSpec graph_from_json(const json& j);

json potential_to_json(const thermo::Potential& psi);
/// neg_log_first needs the graph whose enumeration defines the letters.
thermo::Potential potential_from_json(const json& j, const shift::CountableGraph& g);
/// zero | neg-log-first | path to a potential JSON file.
thermo::Potential parse_potential_spec(const std::string& spec, const shift::CountableGraph& g);

json kernel_to_json(const markov::StochasticKernel& w);
markov::StochasticKernel kernel_from_json(const json& j);

json trajectory_to_json(const trajectory::TrajectoryClass& gamma);
trajectory::TrajectoryClass trajectory_from_json(const json& j);

std::string itineraries_to_csv(const std::vector<trajectory::TrajectoryClass>& sample);
std::vector<std::vector<trajectory::ArcIndex>> itineraries_from_csv(const std::string& text);

std::string truncation_to_dot(const shift::Truncation& t);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace gurevich::io
