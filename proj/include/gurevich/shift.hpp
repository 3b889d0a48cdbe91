#pragma once

// Countable directed graphs, their finite truncations, one-sided Markov shift
// path counts, and Gurevich entropy.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include "gurevich/spectral.hpp"

namespace gurevich::shift {

using State = std::int64_t;
using BigCount = boost::multiprecision::cpp_int;

enum class GraphKind { z_infinity, two_way_path, full, from_edges };

/// Fixed enumeration of Z onto N: 0, 1, -1, 2, -2, ...
std::uint64_t integer_rank(std::int64_t k);
std::int64_t integer_at_rank(std::uint64_t r);

class CountableGraph {
 public:
  /// Arc graph of Z-infinity: even n -> {n+1, n+2}, odd n -> {n-1, n-2}.
  static CountableGraph z_infinity();
  /// Z with k -> k +- 1.
  static CountableGraph two_way_path();
  /// Complete graph with self-loops on {0, ..., n-1}.
  static CountableGraph full(std::size_t n);
  /// Finite graph from an explicit edge list; ranks follow increasing state value.
  static CountableGraph from_edges(std::string name, const std::vector<std::pair<State, State>>& edges);

  GraphKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  bool finite() const { return kind_ == GraphKind::full || kind_ == GraphKind::from_edges; }
  /// Number of states for finite graphs.
  std::optional<std::uint64_t> size() const;
  bool contains(State s) const;

  std::vector<State> successors(State s) const;
  std::vector<State> predecessors(State s) const;

  std::uint64_t rank(State s) const;
  State state_at_rank(std::uint64_t r) const;

  /// sup |t - s| over edges s -> t, when finite.
  std::optional<std::int64_t> increment_bound() const;

  /// Edge list of a finite graph (or of a rank window for infinite ones).
  std::vector<std::pair<State, State>> edges(std::uint64_t max_rank) const;

 private:
  struct EdgeData {
    std::vector<State> states;  // sorted
    std::map<State, std::vector<State>> out;
    std::map<State, std::vector<State>> in;
  };

  GraphKind kind_ = GraphKind::z_infinity;
  std::string name_;
  std::size_t full_size_ = 0;
  std::shared_ptr<const EdgeData> data_;
};

/// Induced finite subgraph. Local vertex i is the i-th state in rank order.
class Truncation {
 public:
  /// States of rank <= q.
  Truncation(const CountableGraph& graph, std::uint64_t q);
  /// Induced subgraph on an explicit state set (order kept as given).
  static Truncation from_states(const CountableGraph& graph, std::vector<State> states);

  const CountableGraph& graph() const { return graph_; }
  std::size_t size() const { return states_.size(); }
  State state(std::size_t i) const { return states_.at(i); }
  const std::vector<State>& states() const { return states_; }
  std::optional<std::size_t> index_of(State s) const;
  std::size_t require_index(State s) const;

  const std::vector<std::vector<std::size_t>>& out() const { return out_; }
  const std::vector<std::vector<std::size_t>>& in() const { return in_; }
  std::size_t edge_count() const;
  bool has_edge(std::size_t i, std::size_t j) const;

  Eigen::MatrixXd dense_adjacency() const;
  spectral::SparseMatrix sparse_adjacency() const;

 private:
  Truncation(const CountableGraph& graph, std::vector<State> states);

  CountableGraph graph_;
  std::vector<State> states_;
  std::unordered_map<State, std::size_t> index_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
};

bool is_admissible(const CountableGraph& g, std::span<const State> word);

struct MetricValue {
  double value = 0.0;       // partial sum over i < horizon
  double tail_bound = 0.0;  // bound on sum over i >= horizon
};

/// d(a, b) = sum |a_i - b_i| / 2^i. The tail uses |a_i - b_i| <= D + 2K(i - h + 1)
/// with D = |a_{h-1} - b_{h-1}| and K the increment bound.
MetricValue shift_metric(std::span<const State> a, std::span<const State> b, std::size_t horizon,
                         std::int64_t increment_bound);
MetricValue shift_metric(const CountableGraph& g, std::span<const State> a,
                         std::span<const State> b, std::size_t horizon);

BigCount path_count(const Truncation& t, State a, State b, std::size_t n);
/// Paths a -> b of length n avoiding b at every intermediate step.
BigCount first_passage_count(const Truncation& t, State a, State b, std::size_t n);
/// All p_ab(k) for k = 0..n in one sweep.
std::vector<BigCount> path_counts(const Truncation& t, State a, State b, std::size_t n);
std::vector<BigCount> first_passage_counts(const Truncation& t, State a, State b, std::size_t n);

/// Natural log of a nonnegative big integer (-inf for zero).
double log_count(const BigCount& c);

struct ConnectivityReport {
  bool connected = false;
  std::size_t period = 0;  // gcd of loop lengths through the base vertex (0 if none)
  std::size_t components = 0;
  std::size_t max_loop_length = 0;
};

/// Loop lengths through local vertex `base` up to max_length.
std::vector<std::size_t> loop_lengths(const Truncation& t, std::size_t base, std::size_t max_length);

ConnectivityReport strong_connectivity_and_period(const Truncation& t);

struct EntropyPoint {
  std::uint64_t q = 0;
  std::size_t states = 0;
  double log_radius = 0.0;   // log spectral radius of the truncation
  double lower_bound = 0.0;  // running sup of log_radius
  spectral::PerronMethod method = spectral::PerronMethod::trivial;
  bool converged = false;
  double path_slope = 0.0;   // (1/n) log p_aa(n) at the rank-0 state
  std::size_t path_length = 0;
};

struct EntropySweep {
  std::vector<EntropyPoint> points;
  double estimate = 0.0;               // last lower bound
  double radius_of_convergence = 0.0;  // exp(-estimate)
};

/// Entropy of a finite subgraph: log of its spectral radius.
EntropyPoint truncation_entropy(const Truncation& t, std::size_t path_length = 0);

EntropySweep gurevich_entropy(const CountableGraph& g, std::span<const std::uint64_t> q_schedule,
                              std::size_t path_length = 200);

std::string to_string(GraphKind k);

}  // namespace gurevich::shift
