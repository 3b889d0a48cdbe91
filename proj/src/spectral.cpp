#include "gurevich/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace gurevich::spectral {

std::vector<std::vector<std::size_t>> SparseMatrix::pattern() const {
  std::vector<std::vector<std::size_t>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [j, w] : rows[i]) {
      if (w > 0.0) out[i].push_back(j);
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> strongly_connected_components(
    const std::vector<std::vector<std::size_t>>& out) {
  const std::size_t n = out.size();
  constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, unset), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> components;
  std::size_t counter = 0;

  // Iterative Tarjan: frames hold (vertex, next edge position).
  std::vector<std::pair<std::size_t, std::size_t>> frames;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unset) continue;
    frames.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      if (pos < out[v].size()) {
        const std::size_t w = out[v][pos++];
        if (index[w] == unset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const std::size_t done = v;
      frames.pop_back();
      if (!frames.empty()) {
        const std::size_t parent = frames.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
      if (low[done] == index[done]) {
        std::vector<std::size_t> comp;
        std::size_t w = 0;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != done);
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
      }
    }
  }
  return components;
}

std::size_t component_period(const std::vector<std::vector<std::size_t>>& out,
                             const std::vector<std::size_t>& component) {
  if (component.empty()) return 0;
  std::vector<char> member(out.size(), 0);
  for (auto v : component) member[v] = 1;
  std::vector<long> level(out.size(), -1);
  std::queue<std::size_t> frontier;
  level[component.front()] = 0;
  frontier.push(component.front());
  std::size_t g = 0;
  while (!frontier.empty()) {
    const std::size_t v = frontier.front();
    frontier.pop();
    for (auto w : out[v]) {
      if (!member[w]) continue;
      if (level[w] < 0) {
        level[w] = level[v] + 1;
        frontier.push(w);
      } else {
        g = std::gcd(g, static_cast<std::size_t>(std::labs(level[v] + 1 - level[w])));
      }
    }
  }
  return g;
}

namespace {

void multiply(const SparseMatrix& a, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < a.n; ++i) {
    double s = 0.0;
    for (const auto& [j, w] : a.rows[i]) s += w * x[j];
    y[i] = s;
  }
}

// Iterates x <- B x, where B = A^power + shift*I, until the Collatz-Wielandt
// bracket closes. Returns the bracket for B.
PerronResult iterate(const SparseMatrix& a, int power, double shift, const PowerOptions& opt) {
  std::vector<double> x(a.n, 1.0), y(a.n), tmp(a.n);
  PerronResult r;
  for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
    if (power == 1) {
      multiply(a, x, y);
    } else {
      multiply(a, x, tmp);
      multiply(a, tmp, y);
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < a.n; ++i) {
      y[i] += shift * x[i];
      if (x[i] > 0.0) {
        const double ratio = y[i] / x[i];
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
      scale = std::max(scale, y[i]);
    }
    r.lower = lo;
    r.upper = hi;
    r.iterations = it;
    if (scale <= 0.0) {
      r.lower = r.upper = 0.0;
      r.converged = true;
      return r;
    }
    if (hi - lo <= opt.relative_tolerance * hi) {
      r.converged = true;
      return r;
    }
    for (std::size_t i = 0; i < a.n; ++i) x[i] = y[i] / scale;
  }
  return r;
}

}  // namespace

PerronResult perron_root(const SparseMatrix& a, const PowerOptions& options,
                         std::size_t known_period) {
  PerronResult r;
  if (a.n == 0) return r;

  if (known_period <= 1) {
    r = iterate(a, 1, 0.0, options);
    r.method = PerronMethod::direct;
    if (r.converged) {
      r.radius = 0.5 * (r.lower + r.upper);
      return r;
    }
  }
  if (known_period <= 2) {
    r = iterate(a, 2, 0.0, options);
    r.method = PerronMethod::two_step;
    if (r.converged) {
      r.lower = std::sqrt(r.lower);
      r.upper = std::sqrt(r.upper);
      r.radius = 0.5 * (r.lower + r.upper);
      return r;
    }
  }
  r = iterate(a, 1, 1.0, options);
  r.method = PerronMethod::shifted;
  r.lower -= 1.0;
  r.upper -= 1.0;
  r.radius = 0.5 * (r.lower + r.upper);
  return r;
}

PerronResult spectral_radius(const SparseMatrix& a, const PowerOptions& options) {
  const auto out = a.pattern();
  PerronResult best;
  best.converged = true;
  for (const auto& comp : strongly_connected_components(out)) {
    const std::size_t period = component_period(out, comp);
    if (period == 0) continue;  // single vertex without a loop
    std::vector<std::size_t> local(a.n, a.n);
    for (std::size_t k = 0; k < comp.size(); ++k) local[comp[k]] = k;
    SparseMatrix sub(comp.size());
    for (std::size_t k = 0; k < comp.size(); ++k) {
      for (const auto& [j, w] : a.rows[comp[k]]) {
        if (local[j] < a.n && w > 0.0) sub.add(k, local[j], w);
      }
    }
    const PerronResult r = perron_root(sub, options, period);
    if (r.radius > best.radius || best.method == PerronMethod::trivial) best = r;
  }
  return best;
}

std::string to_string(PerronMethod m) {
  switch (m) {
    case PerronMethod::trivial: return "trivial";
    case PerronMethod::direct: return "direct";
    case PerronMethod::two_step: return "two_step";
    case PerronMethod::shifted: return "shifted";
  }
  return "unknown";
}

}  // namespace gurevich::spectral
