#include "covctl/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace covctl {

namespace {

void check_interval(const MetricGraph& g, int m, const char* who) {
  if (m < 1) throw std::invalid_argument(std::string(who) + ": robot count must be positive");
  (void)g;
}

void check_init(const MetricGraph& g, int m, const Configuration& init, const char* who) {
  if (init.size() != m)
    throw std::invalid_argument(std::string(who) + ": initial configuration has " + std::to_string(init.size()) +
                                " robots, expected " + std::to_string(m));
  for (int i = 0; i < m; ++i)
    if (init.at(i) < 0 || init.at(i) >= g.vertex_count())
      throw std::invalid_argument(std::string(who) + ": robot " + std::to_string(i) + " starts on invalid vertex");
}

}  // namespace

double relocation_gain(const MetricGraph& g, const ServiceCosts& sc, int robot, VertexId v) {
  const int n = g.vertex_count();
  double gain = 0.0;
  for (VertexId u = 0; u < n; ++u) {
    const std::size_t s = static_cast<std::size_t>(u);
    const double without_r = sc.owner[s] == robot ? sc.second[s] : sc.best[s];
    const double after = std::min(without_r, g.cost(u, v));
    gain += g.weight(u) * (after - sc.best[s]);
  }
  return gain;
}

double epsilon0_schedule(const MetricGraph& g, int m, double epsilon) {
  check_interval(g, m, "epsilon0_schedule");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon0_schedule: epsilon must be positive");
  const double w0 = g.min_positive_weight();
  const double c0 = g.min_positive_cost();
  if (w0 == 0.0 || c0 == 0.0) return 1.0;
  return epsilon * w0 * c0 / (static_cast<double>(g.vertex_count()) * static_cast<double>(m));
}

SolveResult brute_force_optimum(const MetricGraph& g, int m) {
  check_interval(g, m, "brute_force_optimum");
  const int n = g.vertex_count();
  SolveResult res;
  if (m >= n) {
    // Every vertex can host a robot; pad with vertex 0 to keep m positions.
    Configuration q;
    for (int extra = 0; extra < m - n; ++extra) q.positions.push_back(0);
    for (VertexId v = 0; v < n; ++v) q.positions.push_back(v);
    res.config = q;
    res.cost = coverage_cost(g, q);
    res.iterations = 1;
    return res;
  }
  double combos = 1.0;
  for (int k = 0; k < m; ++k) combos = combos * static_cast<double>(n - k) / static_cast<double>(k + 1);
  if (combos > 1e6) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", combos);
    throw std::invalid_argument("brute_force_optimum: C(" + std::to_string(n) + ", " + std::to_string(m) + ") = " +
                                buf + " exceeds the 1000000 guard");
  }

  std::vector<VertexId> pick(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) pick[static_cast<std::size_t>(k)] = k;
  double best = std::numeric_limits<double>::infinity();
  std::vector<VertexId> best_pick;
  long evaluated = 0;
  while (true) {
    ++evaluated;
    double cost = 0.0;
    for (VertexId u = 0; u < n; ++u) {
      double c = g.cost(u, pick[0]);
      for (int k = 1; k < m; ++k) c = std::min(c, g.cost(u, pick[static_cast<std::size_t>(k)]));
      cost += g.weight(u) * c;
    }
    if (cost < best) {  // strict: lexicographic enumeration keeps the smallest tie
      best = cost;
      best_pick = pick;
    }
    int k = m - 1;
    while (k >= 0 && pick[static_cast<std::size_t>(k)] == n - m + k) --k;
    if (k < 0) break;
    ++pick[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < m; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  res.config.positions = best_pick;
  res.cost = best;
  res.iterations = evaluated;
  return res;
}

double swap_gain(const MetricGraph& g, const Configuration& q, const std::vector<int>& out_robots,
                 const std::vector<VertexId>& in_vertices) {
  if (out_robots.empty() || out_robots.size() != in_vertices.size())
    throw std::invalid_argument("swap_gain: robot and vertex lists must be nonempty and of equal size");
  std::set<int> uniq(out_robots.begin(), out_robots.end());
  if (uniq.size() != out_robots.size()) throw std::invalid_argument("swap_gain: duplicate robot in swap");
  const double before = coverage_cost(g, q);
  Configuration moved = q;
  for (std::size_t k = 0; k < out_robots.size(); ++k) {
    const int r = out_robots[k];
    if (r < 0 || r >= q.size()) throw std::invalid_argument("swap_gain: robot UID " + std::to_string(r) + " out of range");
    moved.positions[static_cast<std::size_t>(r)] = in_vertices[k];
  }
  return coverage_cost(g, moved) - before;
}

SolveResult centralized_local_search(const MetricGraph& g, int m, int p, double eps0, Configuration init) {
  check_interval(g, m, "centralized_local_search");
  check_init(g, m, init, "centralized_local_search");
  if (p != 1 && p != 2) throw std::invalid_argument("centralized_local_search: p must be 1 or 2");
  if (!(eps0 > 0.0)) throw std::invalid_argument("centralized_local_search: eps0 must be positive");

  const int n = g.vertex_count();
  SolveResult res;
  res.config = std::move(init);
  res.cost = coverage_cost(g, res.config);

  bool improved = true;
  while (improved) {
    improved = false;
    const ServiceCosts sc = compute_service_costs(g, res.config);
    for (int r = 0; r < m && !improved; ++r) {
      for (VertexId v = 0; v < n && !improved; ++v) {
        if (v == res.config.at(r)) continue;
        if (relocation_gain(g, sc, r, v) <= -eps0) {
          res.config.positions[static_cast<std::size_t>(r)] = v;
          res.cost = coverage_cost(g, res.config);
          res.history.emplace_back(res.config, res.cost);
          ++res.iterations;
          improved = true;
        }
      }
    }
    if (improved || p < 2) continue;
    // Pair swaps, first improvement in lexicographic (r1, r2, v1, v2) order.
    for (int r1 = 0; r1 < m && !improved; ++r1)
      for (int r2 = r1 + 1; r2 < m && !improved; ++r2)
        for (VertexId v1 = 0; v1 < n && !improved; ++v1)
          for (VertexId v2 = v1 + 1; v2 < n && !improved; ++v2) {
            Configuration moved = res.config;
            moved.positions[static_cast<std::size_t>(r1)] = v1;
            moved.positions[static_cast<std::size_t>(r2)] = v2;
            const double cost = coverage_cost(g, moved);
            if (cost - res.cost <= -eps0) {
              res.config = std::move(moved);
              res.cost = cost;
              res.history.emplace_back(res.config, res.cost);
              ++res.iterations;
              improved = true;
            }
          }
  }
  return res;
}

SolveResult descent_baseline(const MetricGraph& g, int m, double eps0, Configuration init, DescentMode mode) {
  check_interval(g, m, "descent_baseline");
  check_init(g, m, init, "descent_baseline");
  if (!(eps0 > 0.0)) throw std::invalid_argument("descent_baseline: eps0 must be positive");

  SolveResult res;
  res.config = std::move(init);
  res.cost = coverage_cost(g, res.config);

  bool improved = true;
  while (improved) {
    improved = false;
    for (int r = 0; r < m; ++r) {
      const auto part = assign_partitions(g, res.config);
      const auto& cell = part.members[static_cast<std::size_t>(r)];
      const VertexId here = res.config.at(r);
      double best_change = 0.0;
      VertexId best_v = here;
      for (VertexId v : cell) {
        if (v == here) continue;
        double change = 0.0;
        if (mode == DescentMode::own_partition) {
          for (VertexId u : cell) change += g.weight(u) * (g.cost(u, v) - g.cost(u, here));
        } else {
          Configuration moved = res.config;
          moved.positions[static_cast<std::size_t>(r)] = v;
          change = coverage_cost(g, moved) - res.cost;
        }
        if (change < best_change) {  // strict: ties keep the smaller vertex id
          best_change = change;
          best_v = v;
        }
      }
      if (best_change <= -eps0) {
        res.config.positions[static_cast<std::size_t>(r)] = best_v;
        res.cost = coverage_cost(g, res.config);
        res.history.emplace_back(res.config, res.cost);
        ++res.iterations;
        improved = true;
      }
    }
  }
  return res;
}

}  // namespace covctl
