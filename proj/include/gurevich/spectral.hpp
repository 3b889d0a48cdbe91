#pragma once

// Perron roots of sparse nonnegative matrices by power iteration with
// Collatz-Wielandt brackets.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace gurevich::spectral {

/// rows[i] holds (j, a_ij) with a_ij > 0.
struct SparseMatrix {
  std::size_t n = 0;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;

  explicit SparseMatrix(std::size_t size = 0) : n(size), rows(size) {}
  void add(std::size_t i, std::size_t j, double w) { rows[i].emplace_back(j, w); }
  std::vector<std::vector<std::size_t>> pattern() const;
};

enum class PerronMethod {
  trivial,   // no cycles: radius 0
  direct,    // iteration on A
  two_step,  // iteration on A^2, square-rooted
  shifted,   // iteration on A + I, minus one
};

struct PerronResult {
  double radius = 0.0;
  double lower = 0.0;  // Collatz-Wielandt bracket at exit
  double upper = 0.0;
  PerronMethod method = PerronMethod::trivial;
  std::size_t iterations = 0;
  bool converged = false;
};

struct PowerOptions {
  double relative_tolerance = 1e-10;
  std::size_t max_iterations = 200000;
};

/// Tarjan's algorithm; components in reverse topological order.
std::vector<std::vector<std::size_t>> strongly_connected_components(
    const std::vector<std::vector<std::size_t>>& out);

/// Period of an irreducible pattern restricted to `component` (BFS level gcd);
/// 0 when the component has no cycle.
std::size_t component_period(const std::vector<std::vector<std::size_t>>& out,
                             const std::vector<std::size_t>& component);

/// Perron root of an irreducible matrix. Tries A, then A^2, then A + I.
PerronResult perron_root(const SparseMatrix& a, const PowerOptions& options = {},
                         std::size_t known_period = 0);

/// Spectral radius as the largest Perron root over strongly connected components.
PerronResult spectral_radius(const SparseMatrix& a, const PowerOptions& options = {});

std::string to_string(PerronMethod m);

}  // namespace gurevich::spectral
