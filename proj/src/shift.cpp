#include "gurevich/shift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "gurevich/error.hpp"

namespace gurevich::shift {

std::uint64_t integer_rank(std::int64_t k) {
  return k > 0 ? static_cast<std::uint64_t>(2 * k - 1) : static_cast<std::uint64_t>(-2 * k);
}

std::int64_t integer_at_rank(std::uint64_t r) {
  const auto half = static_cast<std::int64_t>((r + 1) / 2);
  return (r & 1) ? half : -half;
}

CountableGraph CountableGraph::z_infinity() {
  CountableGraph g;
  g.kind_ = GraphKind::z_infinity;
  g.name_ = "z-infinity";
  return g;
}

CountableGraph CountableGraph::two_way_path() {
  CountableGraph g;
  g.kind_ = GraphKind::two_way_path;
  g.name_ = "two-way-path";
  return g;
}

CountableGraph CountableGraph::full(std::size_t n) {
  if (n == 0) throw InvalidInputError("full graph needs at least one state");
  CountableGraph g;
  g.kind_ = GraphKind::full;
  g.name_ = "full:" + std::to_string(n);
  g.full_size_ = n;
  return g;
}

CountableGraph CountableGraph::from_edges(std::string name,
                                          const std::vector<std::pair<State, State>>& edges) {
  if (edges.empty()) throw InvalidInputError("edge list is empty");
  auto data = std::make_shared<EdgeData>();
  std::set<State> states;
  std::set<std::pair<State, State>> unique(edges.begin(), edges.end());
  for (const auto& [u, v] : unique) {
    states.insert(u);
    states.insert(v);
    data->out[u].push_back(v);
    data->in[v].push_back(u);
  }
  data->states.assign(states.begin(), states.end());
  CountableGraph g;
  g.kind_ = GraphKind::from_edges;
  g.name_ = std::move(name);
  g.data_ = std::move(data);
  return g;
}

std::optional<std::uint64_t> CountableGraph::size() const {
  switch (kind_) {
    case GraphKind::full: return full_size_;
    case GraphKind::from_edges: return data_->states.size();
    default: return std::nullopt;
  }
}

bool CountableGraph::contains(State s) const {
  switch (kind_) {
    case GraphKind::full: return s >= 0 && static_cast<std::uint64_t>(s) < full_size_;
    case GraphKind::from_edges:
      return std::binary_search(data_->states.begin(), data_->states.end(), s);
    default: return true;
  }
}

std::vector<State> CountableGraph::successors(State s) const {
  if (!contains(s)) throw DomainError("state " + std::to_string(s) + " not in graph " + name_);
  switch (kind_) {
    case GraphKind::z_infinity:
      return (s & 1) == 0 ? std::vector<State>{s + 1, s + 2} : std::vector<State>{s - 1, s - 2};
    case GraphKind::two_way_path: return {s - 1, s + 1};
    case GraphKind::full: {
      std::vector<State> all(full_size_);
      std::iota(all.begin(), all.end(), State{0});
      return all;
    }
    case GraphKind::from_edges: {
      auto it = data_->out.find(s);
      return it == data_->out.end() ? std::vector<State>{} : it->second;
    }
  }
  return {};
}

std::vector<State> CountableGraph::predecessors(State s) const {
  if (!contains(s)) throw DomainError("state " + std::to_string(s) + " not in graph " + name_);
  switch (kind_) {
    case GraphKind::z_infinity:
      return (s & 1) == 0 ? std::vector<State>{s - 2, s + 1} : std::vector<State>{s - 1, s + 2};
    case GraphKind::two_way_path: return {s - 1, s + 1};
    case GraphKind::full: return successors(s);
    case GraphKind::from_edges: {
      auto it = data_->in.find(s);
      return it == data_->in.end() ? std::vector<State>{} : it->second;
    }
  }
  return {};
}

std::uint64_t CountableGraph::rank(State s) const {
  if (!contains(s)) throw DomainError("state " + std::to_string(s) + " not in graph " + name_);
  switch (kind_) {
    case GraphKind::full: return static_cast<std::uint64_t>(s);
    case GraphKind::from_edges:
      return static_cast<std::uint64_t>(
          std::lower_bound(data_->states.begin(), data_->states.end(), s) - data_->states.begin());
    default: return integer_rank(s);
  }
}

State CountableGraph::state_at_rank(std::uint64_t r) const {
  if (const auto n = size(); n && r >= *n) {
    throw DomainError("rank " + std::to_string(r) + " beyond graph " + name_);
  }
  switch (kind_) {
    case GraphKind::full: return static_cast<State>(r);
    case GraphKind::from_edges: return data_->states[r];
    default: return integer_at_rank(r);
  }
}

std::optional<std::int64_t> CountableGraph::increment_bound() const {
  switch (kind_) {
    case GraphKind::z_infinity: return 2;
    case GraphKind::two_way_path: return 1;
    case GraphKind::full: return static_cast<std::int64_t>(full_size_) - 1;
    case GraphKind::from_edges: {
      std::int64_t k = 0;
      for (const auto& [u, vs] : data_->out) {
        for (State v : vs) k = std::max(k, std::abs(v - u));
      }
      return k;
    }
  }
  return std::nullopt;
}

std::vector<std::pair<State, State>> CountableGraph::edges(std::uint64_t max_rank) const {
  std::vector<std::pair<State, State>> out;
  std::uint64_t limit = max_rank;
  if (const auto n = size()) limit = std::min<std::uint64_t>(limit, *n - 1);
  for (std::uint64_t r = 0; r <= limit; ++r) {
    const State s = state_at_rank(r);
    for (State t : successors(s)) {
      if (rank(t) <= limit) out.emplace_back(s, t);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Truncation::Truncation(const CountableGraph& graph, std::uint64_t q)
    : Truncation(graph, [&] {
        std::uint64_t last = q;
        if (const auto n = graph.size()) last = std::min<std::uint64_t>(q, *n - 1);
        std::vector<State> states;
        states.reserve(last + 1);
        for (std::uint64_t r = 0; r <= last; ++r) states.push_back(graph.state_at_rank(r));
        return states;
      }()) {}

Truncation Truncation::from_states(const CountableGraph& graph, std::vector<State> states) {
  if (states.empty()) throw InvalidInputError("truncation needs at least one state");
  return Truncation(graph, std::move(states));
}

Truncation::Truncation(const CountableGraph& graph, std::vector<State> states)
    : graph_(graph), states_(std::move(states)) {
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (!graph_.contains(states_[i])) {
      throw DomainError("state " + std::to_string(states_[i]) + " not in graph " + graph_.name());
    }
    if (!index_.emplace(states_[i], i).second) {
      throw InvalidInputError("duplicate state " + std::to_string(states_[i]) + " in truncation");
    }
  }
  out_.resize(states_.size());
  in_.resize(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) {
    for (State t : graph_.successors(states_[i])) {
      if (auto it = index_.find(t); it != index_.end()) {
        out_[i].push_back(it->second);
        in_[it->second].push_back(i);
      }
    }
  }
}

std::optional<std::size_t> Truncation::index_of(State s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Truncation::require_index(State s) const {
  const auto i = index_of(s);
  if (!i) throw DomainError("state " + std::to_string(s) + " is outside the truncation");
  return *i;
}

std::size_t Truncation::edge_count() const {
  std::size_t e = 0;
  for (const auto& o : out_) e += o.size();
  return e;
}

bool Truncation::has_edge(std::size_t i, std::size_t j) const {
  return std::find(out_.at(i).begin(), out_.at(i).end(), j) != out_.at(i).end();
}

Eigen::MatrixXd Truncation::dense_adjacency() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(size()),
                                            static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) {
    for (auto j : out_[i]) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
  }
  return a;
}

spectral::SparseMatrix Truncation::sparse_adjacency() const {
  spectral::SparseMatrix a(size());
  for (std::size_t i = 0; i < size(); ++i) {
    for (auto j : out_[i]) a.add(i, j, 1.0);
  }
  return a;
}

bool is_admissible(const CountableGraph& g, std::span<const State> word) {
  for (State s : word) {
    if (!g.contains(s)) return false;
  }
  for (std::size_t i = 1; i < word.size(); ++i) {
    const auto next = g.successors(word[i - 1]);
    if (std::find(next.begin(), next.end(), word[i]) == next.end()) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

MetricValue shift_metric(std::span<const State> a, std::span<const State> b, std::size_t horizon,
                         std::int64_t increment_bound) {
  if (horizon == 0) throw HorizonError("metric horizon must be positive");
  if (a.size() < horizon || b.size() < horizon) {
    throw HorizonError("sequences shorter than the metric horizon");
  }
  if (increment_bound < 0) throw InvalidInputError("negative increment bound");
  MetricValue m;
  double w = 1.0;
  for (std::size_t i = 0; i < horizon; ++i) {
    m.value += w * static_cast<double>(std::abs(a[i] - b[i]));
    w *= 0.5;
  }
  const double gap = static_cast<double>(std::abs(a[horizon - 1] - b[horizon - 1]));
  m.tail_bound = std::ldexp(2.0 * gap + 8.0 * static_cast<double>(increment_bound),
                            -static_cast<int>(horizon));
  return m;
}

MetricValue shift_metric(const CountableGraph& g, std::span<const State> a,
                         std::span<const State> b, std::size_t horizon) {
  const auto k = g.increment_bound();
  if (!k) {
    throw UnsupportedError("graph " + g.name() +
                           " has unbounded index increments; convergence of d is not guaranteed");
  }
  return shift_metric(a, b, horizon, *k);
}

namespace {

std::vector<BigCount> count_sweep(const Truncation& t, State a, State b, std::size_t n, bool taboo) {
  const std::size_t ia = t.require_index(a);
  const std::size_t ib = t.require_index(b);
  std::vector<BigCount> cur(t.size()), next(t.size());
  std::vector<BigCount> result(n + 1);
  cur[ia] = 1;
  result[0] = (ia == ib) ? 1 : 0;
  for (std::size_t step = 1; step <= n; ++step) {
    for (auto& c : next) c = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (cur[i].is_zero()) continue;
      for (auto j : t.out()[i]) next[j] += cur[i];
    }
    result[step] = next[ib];
    if (taboo) next[ib] = 0;  // paths must not pass through b before the end
    std::swap(cur, next);
  }
  return result;
}

}  // namespace

std::vector<BigCount> path_counts(const Truncation& t, State a, State b, std::size_t n) {
  return count_sweep(t, a, b, n, false);
}

std::vector<BigCount> first_passage_counts(const Truncation& t, State a, State b, std::size_t n) {
  auto r = count_sweep(t, a, b, n, true);
  r[0] = 0;
  return r;
}

BigCount path_count(const Truncation& t, State a, State b, std::size_t n) {
  return path_counts(t, a, b, n).back();
}

BigCount first_passage_count(const Truncation& t, State a, State b, std::size_t n) {
  if (n == 0) return 0;
  return first_passage_counts(t, a, b, n).back();
}

double log_count(const BigCount& c) {
  if (c.is_zero()) return -std::numeric_limits<double>::infinity();
  if (c < 0) throw DomainError("log of a negative count");
  const std::size_t bits = boost::multiprecision::msb(c) + 1;
  if (bits <= 1000) return std::log(c.convert_to<double>());
  const std::size_t drop = bits - 64;
  const BigCount top = c >> drop;
  return std::log(top.convert_to<double>()) + static_cast<double>(drop) * std::log(2.0);
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> loop_lengths(const Truncation& t, std::size_t base, std::size_t max_length) {
  std::vector<std::size_t> lengths;
  std::vector<char> cur(t.size(), 0), next(t.size(), 0);
  cur.at(base) = 1;
  for (std::size_t k = 1; k <= max_length; ++k) {
    std::fill(next.begin(), next.end(), 0);
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!cur[i]) continue;
      for (auto j : t.out()[i]) next[j] = 1;
    }
    if (next[base]) lengths.push_back(k);
    std::swap(cur, next);
  }
  return lengths;
}

ConnectivityReport strong_connectivity_and_period(const Truncation& t) {
  if (t.size() == 0) throw InvalidInputError("empty truncation");
  ConnectivityReport r;
  r.components = spectral::strongly_connected_components(t.out()).size();

  // Forward and backward reachability from vertex 0.
  const auto reach = [&](const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<char> seen(t.size(), 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (auto w : adj[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count;
  };
  r.connected = reach(t.out()) == t.size() && reach(t.in()) == t.size();

  r.max_loop_length = 2 * t.size();
  for (auto len : loop_lengths(t, 0, r.max_loop_length)) r.period = std::gcd(r.period, len);
  return r;
}

EntropyPoint truncation_entropy(const Truncation& t, std::size_t path_length) {
  EntropyPoint p;
  p.states = t.size();
  const auto root = spectral::spectral_radius(t.sparse_adjacency());
  p.method = root.method;
  p.converged = root.converged;
  p.log_radius = root.radius > 0.0 ? std::log(root.radius) : -std::numeric_limits<double>::infinity();
  p.lower_bound = p.log_radius;
  if (path_length > 0) {
    const State a = t.state(0);
    p.path_length = path_length;
    p.path_slope = log_count(path_count(t, a, a, path_length)) / static_cast<double>(path_length);
  }
  return p;
}

EntropySweep gurevich_entropy(const CountableGraph& g, std::span<const std::uint64_t> q_schedule,
                              std::size_t path_length) {
  if (q_schedule.empty()) throw InvalidInputError("empty truncation schedule");
  EntropySweep sweep;
  double sup = -std::numeric_limits<double>::infinity();
  std::uint64_t last_q = 0;
  for (std::size_t k = 0; k < q_schedule.size(); ++k) {
    const std::uint64_t q = q_schedule[k];
    if (k > 0 && q <= last_q) throw InvalidInputError("truncation schedule must be increasing");
    last_q = q;
    const Truncation t(g, q);
    EntropyPoint p = truncation_entropy(t, path_length);
    p.q = q;
    sup = std::max(sup, p.log_radius);
    p.lower_bound = sup;
    sweep.points.push_back(p);
  }
  sweep.estimate = sup;
  sweep.radius_of_convergence = std::exp(-sup);
  return sweep;
}

std::string to_string(GraphKind k) {
  switch (k) {
    case GraphKind::z_infinity: return "z-infinity";
    case GraphKind::two_way_path: return "two-way-path";
    case GraphKind::full: return "full";
    case GraphKind::from_edges: return "edges";
  }
  return "unknown";
}

}  // namespace gurevich::shift
