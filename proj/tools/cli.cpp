#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gurevich/dimension.hpp"
#include "gurevich/error.hpp"
#include "gurevich/io.hpp"
#include "gurevich/markov.hpp"
#include "gurevich/psvf.hpp"
#include "gurevich/shift.hpp"
#include "gurevich/thermo.hpp"
#include "gurevich/trajectory.hpp"

namespace gurevich::cli {

namespace {

using json = nlohmann::json;

struct Config {
  std::string command;
  std::string graph = "z-infinity";
  std::optional<std::uint64_t> q;
  std::string q_schedule;
  std::size_t n_max = 30;
  std::size_t path_length = 200;
  std::string potential = "zero";
  std::string kernel;
  std::string chain = "birth-death:200:0.3:0.7";
  std::string lyapunov;
  std::int64_t base = 0;
  std::int64_t state = 0;
  double lambda = 0.92;
  double eta = 0.95;
  std::size_t m_max = 200;
  std::size_t horizon = 1000;
  std::size_t samples = 100;
  std::size_t len = 64;
  std::int64_t start = 0;
  std::string branching = "fair";
  bool integrate = false;
  double x_min = -8.0;
  double x_max = 8.0;
  double x_step = 0.5;
  std::string m_schedule = "1,2,4";
  std::string depths = "1,2,3,4,5,6,7";
  std::string format = "json";
  std::string output;
  std::uint64_t seed = 0;
};

json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

// Exact counts as JSON integers while they fit, decimal strings beyond.
json big(const shift::BigCount& n) {
  if (n <= std::numeric_limits<std::int64_t>::max()) return n.convert_to<std::int64_t>();
  return n.str();
}

json numbers(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

template <typename T>
std::vector<T> parse_list(const std::string& s, const char* what) {
  std::vector<T> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(part, &used);
      if (used != part.size() || v < 0) throw std::invalid_argument(part);
      out.push_back(static_cast<T>(v));
    } catch (const std::exception&) {
      throw InvalidInputError(std::string("cannot parse ") + what + " entry '" + part + "'");
    }
  }
  if (out.empty()) throw InvalidInputError(std::string(what) + " is empty");
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidInputError(std::string("cannot parse ") + what + " '" + s + "'");
  }
}

std::uint64_t default_q(const shift::CountableGraph& g, std::optional<std::uint64_t> q,
                        std::optional<std::uint64_t> from_spec) {
  if (q) return *q;
  if (from_spec) return *from_spec;
  if (const auto n = g.size()) return *n - 1;
  return 100;
}

markov::BranchingRule parse_branching(const std::string& s) {
  if (s == "fair") return markov::BranchingRule::fair();
  const auto parts = split(s, ':');
  if (parts.size() == 2 && parts[0] == "constant") {
    return markov::BranchingRule::constant(parse_double(parts[1], "branch probability"));
  }
  if (parts.size() == 3 && parts[0] == "inward") {
    return markov::BranchingRule::inward_biased(parse_double(parts[1], "inward probability"),
                                                static_cast<std::int64_t>(parse_double(parts[2], "window")));
  }
  throw InvalidInputError("branching must be fair, constant:P or inward:P:J, got '" + s + "'");
}

markov::StochasticKernel load_chain(const Config& c) {
  if (!c.kernel.empty()) return io::kernel_from_json(json::parse(io::read_file(c.kernel)));
  const auto parts = split(c.chain, ':');
  if (parts.size() == 4 && parts[0] == "birth-death") {
    const double top = parse_double(parts[1], "chain size");
    if (top < 1 || top != std::floor(top)) throw InvalidInputError("chain size must be a positive integer");
    return markov::birth_death_chain(static_cast<std::size_t>(top), parse_double(parts[2], "up probability"),
                                     parse_double(parts[3], "down probability"));
  }
  throw InvalidInputError("chain must be birth-death:N:UP:DOWN, got '" + c.chain + "'");
}

std::vector<double> lyapunov_values(const Config& c, const markov::StochasticKernel& w) {
  double ratio = std::sqrt(7.0 / 3.0);
  if (!c.lyapunov.empty()) {
    const auto parts = split(c.lyapunov, ':');
    if (parts.size() != 2 || parts[0] != "geometric") {
      throw InvalidInputError("lyapunov must be geometric:RATIO, got '" + c.lyapunov + "'");
    }
    ratio = parse_double(parts[1], "Lyapunov ratio");
  }
  std::vector<double> v;
  for (auto label : w.labels()) v.push_back(std::pow(ratio, static_cast<double>(std::llabs(label))));
  return v;
}

json config_echo(const Config& c) {
  json j;
  j["graph"] = c.graph;
  if (c.q) j["q"] = *c.q;
  if (!c.q_schedule.empty()) j["q_schedule"] = c.q_schedule;
  j["n_max"] = c.n_max;
  j["potential"] = c.potential;
  j["format"] = c.format;
  if (c.command == "simulate") {
    j["len"] = c.len;
    j["samples"] = c.samples;
    j["start"] = c.start;
    j["branching"] = c.branching;
    j["integrate"] = c.integrate;
  }
  if (c.command == "mixing" || c.command == "recurrence") {
    j["kernel"] = c.kernel;
    j["chain"] = c.chain;
    j["lyapunov"] = c.lyapunov;
    j["lambda"] = c.lambda;
    j["eta"] = c.eta;
    j["m_max"] = c.m_max;
    j["horizon"] = c.horizon;
    j["samples"] = c.samples;
    j["state"] = c.state;
  }
  if (c.command == "dimension") {
    j["m_schedule"] = c.m_schedule;
    j["depths"] = c.depths;
    j["samples"] = c.samples;
    j["branching"] = c.branching;
  }
  if (c.command == "classify") {
    j["x_min"] = c.x_min;
    j["x_max"] = c.x_max;
    j["x_step"] = c.x_step;
  }
  j["base"] = c.base;
  return j;
}

json provenance(const Config& c) {
  json h;
  h["tool"] = "gurevich";
  h["version"] = kVersion;
  h["command"] = c.command;
  h["seed"] = c.seed;
  h["config"] = config_echo(c);
  return h;
}

// ---------------------------------------------------------------------------

struct Output {
  json result;
  std::optional<std::string> text;  // CSV or DOT body instead of JSON
};

Output cmd_simulate(const Config& c) {
  const auto spec = io::parse_graph_spec(c.graph);
  if (spec.graph.kind() != shift::GraphKind::z_infinity) {
    throw InvalidInputError("simulate only supports --graph z-infinity");
  }
  if (c.len == 0) throw InvalidInputError("--len must be positive");
  const auto rule = parse_branching(c.branching);
  const auto sample = markov::sample_z_infinity_batch(rule, markov::StartLaw{c.start}, c.len, c.samples, c.seed);
  bool all_admissible = true;
  for (const auto& g : sample) all_admissible = all_admissible && trajectory::is_admissible(g.arcs());
  if (c.format == "csv") return {json(), io::itineraries_to_csv(sample)};

  Output o;
  o.result["all_admissible"] = all_admissible;
  o.result["count"] = sample.size();
  json trajectories = json::array();
  for (const auto& g : sample) trajectories.push_back(io::trajectory_to_json(g));
  o.result["trajectories"] = trajectories;
  if (c.integrate) {
    const auto z = psvf::canonical_z_infinity();
    std::size_t agree = 0;
    for (const auto& g : sample) {
      const auto num = trajectory::integrate_trajectory(z, g, g.horizon());
      if (num.itinerary.letters == g.arcs()) ++agree;
    }
    o.result["numeric_agreement"] = agree;
  }
  return o;
}

Output cmd_classify(const Config& c) {
  if (!(c.x_step > 0.0) || !(c.x_max >= c.x_min)) throw InvalidInputError("need --step > 0 and x-max >= x-min");
  const auto z = psvf::canonical_z_infinity();
  json rows = json::array();
  const auto count = static_cast<std::size_t>(std::floor((c.x_max - c.x_min) / c.x_step + 1e-9)) + 1;
  for (std::size_t k = 0; k < count; ++k) {
    const double x = c.x_min + static_cast<double>(k) * c.x_step;
    json row;
    row["x"] = x;
    row["y"] = 0.0;
    try {
      const auto cl = psvf::classify_boundary_point(z, {x, 0.0});
      row["kind"] = psvf::to_string(cl.kind);
      row["description"] = psvf::describe(cl);
      row["plus_first"] = cl.plus_first;
      row["minus_first"] = cl.minus_first;
      row["plus_second"] = cl.plus_second;
      row["minus_second"] = cl.minus_second;
    } catch (const UnsupportedError& e) {
      row["kind"] = "unsupported";
      row["description"] = e.what();
    } catch (const ClassificationError& e) {
      row["kind"] = "unclassified";
      row["description"] = e.what();
    }
    rows.push_back(row);
  }
  Output o;
  o.result["field"] = z.name;
  o.result["points"] = rows;
  return o;
}

std::vector<std::uint64_t> q_list(const Config& c, const io::GraphSpec& spec) {
  if (!c.q_schedule.empty()) return parse_list<std::uint64_t>(c.q_schedule, "q schedule");
  return {default_q(spec.graph, c.q, spec.q)};
}

Output cmd_entropy(const Config& c) {
  const auto spec = io::parse_graph_spec(c.graph);
  const auto qs = q_list(c, spec);
  const auto sweep = shift::gurevich_entropy(spec.graph, qs, c.path_length);
  json points = json::array();
  for (const auto& p : sweep.points) {
    points.push_back({{"q", p.q},
                      {"states", p.states},
                      {"log_radius", number(p.log_radius)},
                      {"lower_bound", number(p.lower_bound)},
                      {"method", spectral::to_string(p.method)},
                      {"converged", p.converged},
                      {"path_slope", number(p.path_slope)},
                      {"path_length", p.path_length}});
  }
  Output o;
  o.result["graph"] = spec.graph.name();
  o.result["points"] = points;
  o.result["h"] = number(sweep.estimate);
  o.result["radius_of_convergence"] = number(sweep.radius_of_convergence);
  return o;
}

json pressure_json(const thermo::PressureEstimate& p) {
  json j;
  j["base"] = p.base;
  j["values"] = numbers(p.summary.values);
  j["period"] = p.summary.period;
  j["last"] = number(p.summary.last);
  j["cesaro"] = number(p.summary.cesaro);
  j["trend"] = number(p.summary.trend);
  j["estimate"] = number(p.estimate);
  j["spectral"] = number(p.spectral);
  j["spectral_method"] = p.spectral_method;
  j["mixing"] = p.mixing;
  if (p.alt_base) {
    j["alt_base"] = *p.alt_base;
    j["alt_estimate"] = number(*p.alt_estimate);
    j["base_gap"] = number(*p.base_gap);
  }
  return j;
}

Output cmd_pressure(const Config& c) {
  const auto spec = io::parse_graph_spec(c.graph);
  const auto psi = io::parse_potential_spec(c.potential, spec.graph);
  const auto qs = q_list(c, spec);
  const auto sweep = thermo::pressure_sweep(psi, spec.graph, qs, c.base, c.n_max);
  json points = json::array();
  for (const auto& p : sweep) {
    json j = pressure_json(p.estimate);
    j["q"] = p.q;
    points.push_back(j);
  }
  Output o;
  o.result["graph"] = spec.graph.name();
  o.result["potential"] = thermo::to_string(psi.kind());
  o.result["points"] = points;
  o.result["estimate"] = number(sweep.back().estimate.estimate);
  return o;
}

Output cmd_recurrence(const Config& c) {
  Output o;
  if (!c.kernel.empty()) {
    const auto w = load_chain(c);
    const auto r = markov::classify_recurrence(w, c.state, c.horizon, c.samples, c.seed);
    o.result["state"] = c.state;
    o.result["verdict"] = markov::to_string(r.verdict);
    o.result["returns"] = r.returns;
    o.result["late_returns"] = r.late_returns;
    o.result["f_hat"] = r.f_hat;
    o.result["f_interval"] = {r.f_low, r.f_high};
    o.result["mean_return_time"] = r.mean_return_time;
    o.result["return_time_stderr"] = r.return_time_stderr;
    return o;
  }
  const auto spec = io::parse_graph_spec(c.graph);
  const shift::Truncation t(spec.graph, default_q(spec.graph, c.q, spec.q));
  const auto r = thermo::d_infinity(c.base, c.n_max, t);
  json z_star = json::array();
  const auto counts = shift::first_passage_counts(t, c.base, c.base, c.n_max);
  for (std::size_t n = 1; n < counts.size(); ++n) z_star.push_back(big(counts[n]));
  o.result["graph"] = spec.graph.name();
  o.result["states"] = t.size();
  o.result["base"] = c.base;
  o.result["z_star"] = z_star;
  o.result["d_infinity"] = number(r.d_infinity);
  o.result["h_G"] = number(r.entropy);
  o.result["strongly_positive_recurrent"] = r.strongly_positive_recurrent;
  return o;
}

Output cmd_mixing(const Config& c) {
  const auto w = load_chain(c);
  const auto cert = markov::lyapunov_verify(w, lyapunov_values(c, w), c.base, c.lambda);
  Output o;
  o.result["states"] = w.size();
  o.result["certificate"] = {{"lambda", cert.lambda},
                             {"achieved_drift", cert.achieved_drift},
                             {"base_holds", cert.base_holds},
                             {"valid", cert.valid},
                             {"violations", cert.violations}};
  if (cert.worst_state) o.result["certificate"]["worst_state"] = w.label(*cert.worst_state);
  if (!cert.valid) {
    o.result["bound_dominates"] = nullptr;
    return o;
  }
  const auto pi = markov::stationary_distribution(w).pi;
  const auto report = markov::mixing_report(w, pi, cert, c.eta, w.require_index(c.state), c.m_max);
  json curve = json::array();
  for (const auto& p : report.points) curve.push_back({{"m", p.m}, {"tv", p.tv}, {"bound", p.bound}});
  o.result["theta"] = cert.achieved_drift;
  o.result["eta"] = c.eta;
  o.result["curve"] = curve;
  o.result["bound_dominates"] = report.bound_dominates;
  o.result["tv_nonincreasing"] = report.tv_nonincreasing;
  return o;
}

Output cmd_dimension(const Config& c) {
  const auto spec = io::parse_graph_spec(c.graph);
  const auto ms = parse_list<std::size_t>(c.m_schedule, "M schedule");
  const auto qs = c.q_schedule.empty() ? std::vector<std::uint64_t>{4, 8} : parse_list<std::uint64_t>(c.q_schedule, "q schedule");
  const auto inf = dimension::entropy_at_infinity(spec.graph, ms, qs, c.n_max);

  const shift::Truncation t(spec.graph, default_q(spec.graph, c.q, spec.q));
  const auto rec = thermo::d_infinity(t.state(0), c.n_max, t);
  const auto bounds = dimension::hausdorff_bounds(rec.entropy, inf.estimate, rec.strongly_positive_recurrent);

  Output o;
  json table = json::array();
  for (const auto& cell : inf.table) {
    json z = json::array();
    for (const auto& zc : cell.z) z.push_back(big(zc.count));
    table.push_back({{"M", cell.m}, {"q", cell.q}, {"z", z}, {"h", number(cell.h)}, {"undercount", cell.undercount}});
  }
  o.result["graph"] = spec.graph.name();
  o.result["h_inf_table"] = table;
  o.result["h_inf"] = number(inf.estimate);
  o.result["undercount"] = inf.undercount;
  o.result["h_G"] = number(rec.entropy);
  o.result["d_infinity"] = number(rec.d_infinity);
  o.result["bounds"] = {{"recurrent", bounds.recurrent},
                        {"escaping_recurrent", bounds.escaping_recurrent},
                        {"strict", bounds.strict.value_or(false)}};

  if (c.samples >= 1000) {
    const auto depths = parse_list<std::size_t>(c.depths, "depths");
    std::size_t deepest = 0;
    for (auto d : depths) deepest = std::max(deepest, d);
    std::vector<std::vector<shift::State>> sample;
    if (spec.graph.kind() == shift::GraphKind::z_infinity) {
      const auto rule = parse_branching(c.branching);
      // Without a window there is no stationary start law; start at the origin.
      const markov::StartLaw start = rule.window > 0 ? markov::StartLaw{} : markov::StartLaw{0};
      for (const auto& g : markov::sample_z_infinity_batch(rule, start, deepest, c.samples, c.seed)) {
        sample.push_back(g.arcs());
      }
    } else if (spec.graph.kind() == shift::GraphKind::full) {
      markov::Rng rng(c.seed);
      std::uniform_int_distribution<shift::State> letter(0, static_cast<shift::State>(*spec.graph.size()) - 1);
      for (std::size_t s = 0; s < c.samples; ++s) {
        std::vector<shift::State> x(deepest);
        for (auto& a : x) a = letter(rng);
        sample.push_back(std::move(x));
      }
    } else {
      throw InvalidInputError("box counting samples only z-infinity or full:N");
    }
    const auto est = dimension::box_dimension_estimate(sample, depths);
    json counts = json::array();
    for (auto n : est.counts) counts.push_back(n);
    o.result["box"] = {{"scales", est.scales}, {"counts", counts}, {"slope", est.slope}, {"stderr", est.stderr_},
                       {"note", est.note}};
  }
  return o;
}

Output cmd_export_graph(const Config& c) {
  const auto spec = io::parse_graph_spec(c.graph);
  const std::uint64_t q = default_q(spec.graph, c.q, spec.q);
  if (c.format == "dot") return {json(), io::truncation_to_dot(shift::Truncation(spec.graph, q))};
  Output o;
  o.result = io::graph_to_json(spec.graph, q);
  const shift::Truncation t(spec.graph, q);
  json edges = json::array();
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (auto j : t.out()[i]) edges.push_back({t.state(i), t.state(j)});
  }
  o.result["truncation_edges"] = edges;
  return o;
}

const char* module_of(const std::string& command) {
  if (command == "simulate") return "trajectory";
  if (command == "classify") return "psvf";
  if (command == "entropy" || command == "export-graph") return "shift";
  if (command == "pressure") return "thermo";
  if (command == "recurrence") return "thermo/markov_chain";
  if (command == "mixing") return "markov_chain";
  if (command == "dimension") return "dimension";
  return "cli";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  if (const char* env = std::getenv("GUREVICH_SEED")) {
    try {
      c.seed = std::stoull(env);
    } catch (const std::exception&) {
      err << "error: GUREVICH_SEED='" << env << "' is not an unsigned integer\n";
      return config_error;
    }
  }

  CLI::App app{"Symbolic dynamics of the Z-infinity piecewise smooth field"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", c.seed, "random seed (default: $GUREVICH_SEED or 0)");
    sub->add_option("-o,--output", c.output, "write the result here instead of stdout");
  };
  const auto graph_opts = [&](CLI::App* sub) {
    sub->add_option("--graph", c.graph, "z-infinity | two-way-path | full:N | graph.json");
    sub->add_option("--q", c.q, "truncation: states of rank <= q");
  };

  auto* simulate = app.add_subcommand("simulate", "sample Z-infinity trajectories and itineraries");
  common(simulate);
  graph_opts(simulate);
  simulate->add_option("--len", c.len, "branch choices per trajectory");
  simulate->add_option("--samples", c.samples, "number of trajectories");
  simulate->add_option("--start", c.start, "start two-fold");
  simulate->add_option("--branching", c.branching, "fair | constant:P | inward:P:J");
  simulate->add_flag("--integrate", c.integrate, "also integrate each trajectory numerically");
  simulate->add_option("--format", c.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  auto* classify = app.add_subcommand("classify", "classify switching-line points of Z-infinity");
  common(classify);
  classify->add_option("--x-min", c.x_min);
  classify->add_option("--x-max", c.x_max);
  classify->add_option("--step", c.x_step);

  auto* entropy = app.add_subcommand("entropy", "Gurevich entropy sweep over truncations");
  common(entropy);
  graph_opts(entropy);
  entropy->add_option("--q-schedule", c.q_schedule, "comma-separated increasing cutoffs");
  entropy->add_option("--path-length", c.path_length, "n for the path-count slope");

  auto* pressure = app.add_subcommand("pressure", "Gurevich pressure from periodic-point sums");
  common(pressure);
  graph_opts(pressure);
  pressure->add_option("--q-schedule", c.q_schedule, "comma-separated increasing cutoffs");
  pressure->add_option("--potential", c.potential, "zero | neg-log-first | potential.json");
  pressure->add_option("--n-max", c.n_max, "largest period");
  pressure->add_option("--base", c.base, "base symbol a");

  auto* recurrence = app.add_subcommand("recurrence", "first-return sums, D_inf and recurrence sampling");
  common(recurrence);
  graph_opts(recurrence);
  recurrence->add_option("--n-max", c.n_max, "largest return time");
  recurrence->add_option("--base", c.base, "base symbol a");
  recurrence->add_option("--kernel", c.kernel, "kernel.json: sample first returns instead");
  recurrence->add_option("--state", c.state, "state whose returns are sampled");
  recurrence->add_option("--horizon", c.horizon, "steps per sample");
  recurrence->add_option("--samples", c.samples, "number of samples");

  auto* mixing = app.add_subcommand("mixing", "Lyapunov certificate and mixing bound against exact TV");
  common(mixing);
  mixing->add_option("--kernel", c.kernel, "kernel.json");
  mixing->add_option("--chain", c.chain, "birth-death:N:UP:DOWN (used without --kernel)");
  mixing->add_option("--lyapunov", c.lyapunov, "geometric:RATIO, V(a) = RATIO^|a|");
  mixing->add_option("--base", c.base, "base state a*");
  mixing->add_option("--lambda", c.lambda, "proposed drift");
  mixing->add_option("--eta", c.eta, "eta in (theta, 1)");
  mixing->add_option("--state", c.state, "start state i");
  mixing->add_option("--m-max", c.m_max, "last time step");

  auto* dim = app.add_subcommand("dimension", "entropy at infinity, dimension bounds, box counting");
  common(dim);
  graph_opts(dim);
  dim->add_option("--m-schedule", c.m_schedule, "comma-separated M values");
  dim->add_option("--q-schedule", c.q_schedule, "comma-separated q values");
  dim->add_option("--n-max", c.n_max, "largest word length n");
  dim->add_option("--samples", c.samples, "box-count sample size (>= 1000 to enable)");
  dim->add_option("--depths", c.depths, "cylinder depths k (scales 2^-k)");
  dim->add_option("--branching", c.branching, "branching rule for Z-infinity samples");

  auto* exporter = app.add_subcommand("export-graph", "write a truncation as DOT or JSON");
  common(exporter);
  graph_opts(exporter);
  exporter->add_option("--format", c.format, "json | dot")->check(CLI::IsMember({"json", "dot"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : config_error;
  }
  c.command = app.get_subcommands().front()->get_name();
  if (c.command == "dimension" && c.n_max == 30) c.n_max = 20;

  Output result;
  try {
    if (c.command == "simulate") result = cmd_simulate(c);
    else if (c.command == "classify") result = cmd_classify(c);
    else if (c.command == "entropy") result = cmd_entropy(c);
    else if (c.command == "pressure") result = cmd_pressure(c);
    else if (c.command == "recurrence") result = cmd_recurrence(c);
    else if (c.command == "mixing") result = cmd_mixing(c);
    else if (c.command == "dimension") result = cmd_dimension(c);
    else result = cmd_export_graph(c);
  } catch (const InvalidInputError& e) {
    err << "error: " << e.what() << '\n';
    return config_error;
  } catch (const json::exception& e) {
    err << "error: malformed input: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    err << "numeric failure in " << module_of(c.command) << " (" << c.command
        << ", inputs: " << config_echo(c).dump() << "): " << e.what() << '\n';
    return numeric_error;
  }

  std::string body;
  if (result.text) {
    body = "# " + provenance(c).dump() + "\n" + *result.text;
  } else {
    json doc;
    doc["provenance"] = provenance(c);
    doc["result"] = result.result;
    body = doc.dump(2) + "\n";
  }
  try {
    if (c.output.empty()) {
      out << body;
    } else {
      io::write_file(c.output, body);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return config_error;
  }
  return ok;
}

}  // namespace gurevich::cli
