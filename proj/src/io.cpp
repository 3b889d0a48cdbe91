#include "gurevich/io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "gurevich/error.hpp"

namespace gurevich::io {

namespace {

std::int64_t parse_int(const std::string& s, const std::string& what) {
  std::int64_t v = 0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin < end && *begin == ' ') ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\r')) --end;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || begin == end) {
    throw InvalidInputError("cannot parse " + what + " '" + s + "' as an integer");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

template <typename F>
auto schema(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("malformed ") + what + " JSON: " + e.what());
  }
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot write '" + path + "'");
  out << content;
}

GraphSpec parse_graph_spec(const std::string& spec) {
  if (spec == "z-infinity") return {shift::CountableGraph::z_infinity(), std::nullopt};
  if (spec == "two-way-path") return {shift::CountableGraph::two_way_path(), std::nullopt};
  if (spec.rfind("full:", 0) == 0) {
    const auto n = parse_int(spec.substr(5), "full graph size");
    if (n < 1) throw InvalidInputError("full graph size must be >= 1");
    return {shift::CountableGraph::full(static_cast<std::size_t>(n)), std::nullopt};
  }
  const std::string text = read_file(spec);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInputError("graph file '" + spec + "' is not valid JSON: " + e.what());
  }
  return graph_from_json(j);
}

json graph_to_json(const shift::CountableGraph& g, std::optional<std::uint64_t> q) {
  json j;
  if (g.kind() == shift::GraphKind::from_edges) {
    j["kind"] = "edges";
    j["name"] = g.name();
    json edges = json::array();
    for (const auto& [u, v] : g.edges(*g.size())) edges.push_back({u, v});
    j["edges"] = edges;
  } else {
    j["kind"] = "builtin";
    j["name"] = g.name();
  }
  if (q) j["q"] = *q;
  return j;
}

GraphSpec graph_from_json(const json& j) {
  return schema("graph", [&] {
    const std::string kind = j.at("kind").get<std::string>();
    GraphSpec spec{shift::CountableGraph::z_infinity(), std::nullopt};
    if (kind == "builtin") {
      const std::string name = j.at("name").get<std::string>();
      if (name.rfind("full:", 0) != 0 && name != "z-infinity" && name != "two-way-path") {
        throw InvalidInputError("unknown builtin graph '" + name + "'");
      }
      spec.graph = parse_graph_spec(name).graph;
    } else if (kind == "edges") {
      std::vector<std::pair<shift::State, shift::State>> edges;
      for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw InvalidInputError("each edge must be a pair [i, j]");
        edges.emplace_back(e[0].get<shift::State>(), e[1].get<shift::State>());
      }
      spec.graph = shift::CountableGraph::from_edges(j.value("name", std::string("edges")), edges);
    } else {
      throw InvalidInputError("graph kind must be 'builtin' or 'edges', got '" + kind + "'");
    }
    if (j.contains("q") && !j["q"].is_null()) spec.q = j["q"].get<std::uint64_t>();
    return spec;
  });
}

json potential_to_json(const thermo::Potential& psi) {
  json j;
  j["kind"] = thermo::to_string(psi.kind());
  switch (psi.kind()) {
    case thermo::PotentialKind::zero: j["depth"] = 0; break;
    case thermo::PotentialKind::neg_log_first: j["depth"] = 1; break;
    case thermo::PotentialKind::table: {
      j["depth"] = psi.depth();
      json entries = json::object();
      for (const auto& [w, v] : psi.entries()) {
        std::string key;
        for (std::size_t i = 0; i < w.size(); ++i) key += (i ? "," : "") + std::to_string(w[i]);
        entries[key] = v;
      }
      j["entries"] = entries;
      break;
    }
    case thermo::PotentialKind::general:
      throw UnsupportedError("general potentials have no JSON form");
  }
  return j;
}

thermo::Potential potential_from_json(const json& j, const shift::CountableGraph& g) {
  return schema("potential", [&] {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") return thermo::Potential::zero();
    if (kind == "neg_log_first" || kind == "neg-log-first") return thermo::Potential::neg_log_first(g);
    if (kind != "table") throw InvalidInputError("unknown potential kind '" + kind + "'");
    const auto depth = j.at("depth").get<std::size_t>();
    std::map<thermo::Word, double> entries;
    for (const auto& [key, value] : j.at("entries").items()) {
      thermo::Word w;
      for (const auto& part : split(key, ',')) w.push_back(parse_int(part, "potential word letter"));
      entries[w] = value.get<double>();
    }
    return thermo::Potential::table(depth, std::move(entries));
  });
}

thermo::Potential parse_potential_spec(const std::string& spec, const shift::CountableGraph& g) {
  if (spec == "zero") return thermo::Potential::zero();
  if (spec == "neg-log-first" || spec == "neg_log_first") return thermo::Potential::neg_log_first(g);
  json j;
  try {
    j = json::parse(read_file(spec));
  } catch (const json::exception& e) {
    throw InvalidInputError("potential file '" + spec + "' is not valid JSON: " + e.what());
  }
  return potential_from_json(j, g);
}

json kernel_to_json(const markov::StochasticKernel& w) {
  json j;
  j["states"] = w.labels();
  json rows = json::object();
  for (std::size_t i = 0; i < w.size(); ++i) {
    json row = json::object();
    for (const auto& [k, x] : w.row(i)) row[std::to_string(w.label(k))] = x;
    rows[std::to_string(w.label(i))] = row;
  }
  j["rows"] = rows;
  return j;
}

markov::StochasticKernel kernel_from_json(const json& j) {
  return schema("kernel", [&] {
    std::vector<shift::State> labels;
    const json& states = j.at("states");
    if (states.is_number_integer()) {
      const auto n = states.get<std::int64_t>();
      if (n < 1) throw InvalidInputError("kernel needs at least one state");
      for (std::int64_t i = 0; i < n; ++i) labels.push_back(i);
    } else {
      labels = states.get<std::vector<shift::State>>();
    }
    std::map<shift::State, std::size_t> index;
    for (std::size_t i = 0; i < labels.size(); ++i) index[labels[i]] = i;
    const auto lookup = [&](const std::string& key) {
      const auto s = parse_int(key, "kernel state");
      auto it = index.find(s);
      if (it == index.end()) throw InvalidInputError("kernel row refers to unknown state " + key);
      return it->second;
    };
    std::vector<markov::StochasticKernel::Row> rows(labels.size());
    std::set<std::size_t> seen;
    for (const auto& [from, row] : j.at("rows").items()) {
      const std::size_t i = lookup(from);
      seen.insert(i);
      for (const auto& [to, w] : row.items()) rows[i].emplace_back(lookup(to), w.get<double>());
    }
    if (seen.size() != labels.size()) throw InvalidInputError("kernel JSON is missing rows");
    return markov::StochasticKernel(std::move(labels), std::move(rows), 1e-9);
  });
}

json trajectory_to_json(const trajectory::TrajectoryClass& gamma) {
  json j;
  j["start_two_fold"] = gamma.start_two_fold();
  json choices = json::array();
  for (auto c : gamma.choices()) choices.push_back(trajectory::to_string(c));
  j["choices"] = choices;
  j["itinerary"] = gamma.arcs();
  return j;
}

trajectory::TrajectoryClass trajectory_from_json(const json& j) {
  return schema("trajectory", [&] {
    std::vector<trajectory::Branch> choices;
    for (const auto& c : j.at("choices")) choices.push_back(trajectory::parse_branch(c.get<std::string>()));
    auto gamma = trajectory::build_trajectory(j.at("start_two_fold").get<std::int64_t>(), std::move(choices));
    if (j.contains("itinerary") &&
        j["itinerary"].get<std::vector<trajectory::ArcIndex>>() != gamma.arcs()) {
      throw InvalidInputError("trajectory itinerary does not match its branch choices");
    }
    return gamma;
  });
}

std::string itineraries_to_csv(const std::vector<trajectory::TrajectoryClass>& sample) {
  std::ostringstream out;
  for (const auto& g : sample) {
    const auto& arcs = g.arcs();
    for (std::size_t i = 0; i < arcs.size(); ++i) out << (i ? "," : "") << arcs[i];
    out << '\n';
  }
  return out.str();
}

std::vector<std::vector<trajectory::ArcIndex>> itineraries_from_csv(const std::string& text) {
  std::vector<std::vector<trajectory::ArcIndex>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<trajectory::ArcIndex> row;
    for (const auto& cell : split(line, ',')) row.push_back(parse_int(cell, "arc index on line " + std::to_string(number)));
    if (!trajectory::is_admissible(row)) {
      throw InvalidInputError("itinerary on line " + std::to_string(number) + " violates the successor rule");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string truncation_to_dot(const shift::Truncation& t) {
  std::ostringstream out;
  out << "digraph \"" << t.graph().name() << "\" {\n";
  for (std::size_t i = 0; i < t.size(); ++i) out << "  \"" << t.state(i) << "\";\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (auto j : t.out()[i]) out << "  \"" << t.state(i) << "\" -> \"" << t.state(j) << "\";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace gurevich::io
