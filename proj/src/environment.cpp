#include "covctl/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>

namespace covctl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

void check_cov(const std::array<double, 4>& cov, const char* who) {
  const double scale = std::max({std::abs(cov[0]), std::abs(cov[1]), std::abs(cov[2]), std::abs(cov[3]), 1e-300});
  if (std::abs(cov[1] - cov[2]) > 1e-9 * scale)
    throw std::invalid_argument(std::string(who) + ": covariance matrix is not symmetric");
  const double det = cov[0] * cov[3] - cov[1] * cov[2];
  if (!(cov[0] > 0.0) || !(det > 0.0))
    throw std::invalid_argument(std::string(who) + ": covariance matrix is not positive definite");
}

// z-component of (b-a) x (p-a); zero when collinear.
double cross(Point a, Point b, Point p) { return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x); }

bool on_segment(Point a, Point b, Point p) {
  const double scale = std::max({std::abs(a.x), std::abs(a.y), std::abs(b.x), std::abs(b.y), 1.0});
  if (std::abs(cross(a, b, p)) > 1e-12 * scale) return false;
  return p.x >= std::min(a.x, b.x) - 1e-12 && p.x <= std::max(a.x, b.x) + 1e-12 &&
         p.y >= std::min(a.y, b.y) - 1e-12 && p.y <= std::max(a.y, b.y) + 1e-12;
}

// Blocked region is the closed polygon: boundary points count as inside.
bool in_polygon(const std::vector<Point>& ring, Point p) {
  const std::size_t n = ring.size();
  bool inside = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = ring[i];
    const Point b = ring[(i + 1) % n];
    if (on_segment(a, b, p)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_at = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_at) inside = !inside;
    }
  }
  return inside;
}

// 8-neighborhood, fixed scan order for determinism.
constexpr int kDx[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
constexpr int kDy[8] = {-1, -1, -1, 0, 0, 1, 1, 1};

template <typename F>
void for_each_neighbor(const FineGrid& fg, int node, F&& fn) {
  const int cell = fg.cell_of[static_cast<std::size_t>(node)];
  const int ix = cell % fg.nx;
  const int iy = cell / fg.nx;
  const double diag = fg.res * std::sqrt(2.0);
  for (int k = 0; k < 8; ++k) {
    const int jx = ix + kDx[k];
    const int jy = iy + kDy[k];
    if (jx < 0 || jx >= fg.nx || jy < 0 || jy >= fg.ny) continue;
    const int other = fg.node_at[static_cast<std::size_t>(jy) * fg.nx + jx];
    if (other < 0) continue;
    if (kDx[k] != 0 && kDy[k] != 0) {
      // Diagonal moves must not cut a blocked corner.
      if (fg.node_at[static_cast<std::size_t>(iy) * fg.nx + jx] < 0 ||
          fg.node_at[static_cast<std::size_t>(jy) * fg.nx + ix] < 0)
        continue;
      fn(other, diag);
    } else {
      fn(other, fg.res);
    }
  }
}

int clipped_count(double extent, double pitch) {
  return std::max(1, static_cast<int>(std::ceil(extent / pitch - 1e-12)));
}

Point clipped_center(int ix, int iy, double pitch, double w, double h) {
  const double x0 = ix * pitch, x1 = std::min((ix + 1) * pitch, w);
  const double y0 = iy * pitch, y1 = std::min((iy + 1) * pitch, h);
  return {0.5 * (x0 + x1), 0.5 * (y0 + y1)};
}

double clipped_area(int ix, int iy, double pitch, double w, double h) {
  const double x0 = ix * pitch, x1 = std::min((ix + 1) * pitch, w);
  const double y0 = iy * pitch, y1 = std::min((iy + 1) * pitch, h);
  return (x1 - x0) * (y1 - y0);
}

}  // namespace

// --- Density ----------------------------------------------------------------

Density Density::uniform() { return Density(); }

Density Density::gaussian(std::array<double, 2> mean, std::array<double, 4> cov) {
  check_cov(cov, "Density::gaussian");
  Density d;
  d.components_.push_back({mean, cov, 1.0});
  return d;
}

Density Density::mixture(std::vector<Gaussian> components) {
  if (components.empty()) throw std::invalid_argument("Density::mixture: component list is empty");
  for (std::size_t i = 0; i < components.size(); ++i) {
    check_cov(components[i].cov, "Density::mixture");
    if (!(components[i].weight > 0.0))
      throw std::invalid_argument("Density::mixture: component " + std::to_string(i) + " has nonpositive weight");
  }
  Density d;
  d.components_ = std::move(components);
  return d;
}

double Density::value(double x, double y) const {
  if (components_.empty()) return 1.0;
  double v = 0.0;
  for (const auto& c : components_) {
    const double dx = x - c.mean[0];
    const double dy = y - c.mean[1];
    const double det = c.cov[0] * c.cov[3] - c.cov[1] * c.cov[2];
    const double quad = (c.cov[3] * dx * dx - (c.cov[1] + c.cov[2]) * dx * dy + c.cov[0] * dy * dy) / det;
    v += c.weight / (2.0 * kPi * std::sqrt(det)) * std::exp(-0.5 * quad);
  }
  return v;
}

nlohmann::ordered_json Density::to_json() const {
  nlohmann::ordered_json j;
  if (components_.empty()) {
    j["kind"] = "uniform";
    return j;
  }
  auto comp_json = [](const Gaussian& c) {
    nlohmann::ordered_json g;
    g["weight"] = c.weight;
    g["mean"] = {c.mean[0], c.mean[1]};
    g["cov"] = {{c.cov[0], c.cov[1]}, {c.cov[2], c.cov[3]}};
    return g;
  };
  if (components_.size() == 1 && components_[0].weight == 1.0) {
    j["kind"] = "gaussian";
    j["mean"] = {components_[0].mean[0], components_[0].mean[1]};
    j["cov"] = {{components_[0].cov[0], components_[0].cov[1]}, {components_[0].cov[2], components_[0].cov[3]}};
    return j;
  }
  j["kind"] = "mixture";
  j["components"] = nlohmann::ordered_json::array();
  for (const auto& c : components_) j["components"].push_back(comp_json(c));
  return j;
}

namespace {

std::array<double, 2> parse_mean(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("density: \"mean\" must be a 2-element array");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::array<double, 4> parse_cov(const nlohmann::json& j) {
  if (j.is_array() && j.size() == 2 && j[0].is_array() && j[0].size() == 2 && j[1].is_array() && j[1].size() == 2)
    return {j[0][0].get<double>(), j[0][1].get<double>(), j[1][0].get<double>(), j[1][1].get<double>()};
  throw std::invalid_argument("density: \"cov\" must be a 2x2 array");
}

}  // namespace

Density Density::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw std::invalid_argument("density: missing \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform") return uniform();
  if (kind == "gaussian") {
    if (!j.contains("mean") || !j.contains("cov"))
      throw std::invalid_argument("density: gaussian requires \"mean\" and \"cov\"");
    return gaussian(parse_mean(j.at("mean")), parse_cov(j.at("cov")));
  }
  if (kind == "mixture") {
    if (!j.contains("components") || !j.at("components").is_array())
      throw std::invalid_argument("density: mixture requires a \"components\" array");
    std::vector<Gaussian> comps;
    for (const auto& c : j.at("components")) {
      Gaussian g;
      g.weight = c.contains("weight") ? c.at("weight").get<double>() : 1.0;
      g.mean = parse_mean(c.at("mean"));
      g.cov = parse_cov(c.at("cov"));
      comps.push_back(g);
    }
    return mixture(std::move(comps));
  }
  throw std::invalid_argument("density: unknown kind \"" + kind + "\"");
}

// --- Environment --------------------------------------------------------------

Environment::Environment(double width, double height, std::vector<std::vector<Point>> obstacles, Density density)
    : width_(width), height_(height), obstacles_(std::move(obstacles)), density_(std::move(density)) {
  if (!(width_ > 0.0) || !(height_ > 0.0))
    throw std::invalid_argument("Environment: bounds must be positive, got " + std::to_string(width_) + " x " +
                                std::to_string(height_));
  for (std::size_t i = 0; i < obstacles_.size(); ++i) {
    if (obstacles_[i].size() < 3)
      throw std::invalid_argument("Environment: obstacle " + std::to_string(i) + " has fewer than 3 vertices");
    for (const Point& p : obstacles_[i])
      if (p.x < -1e-12 || p.x > width_ + 1e-12 || p.y < -1e-12 || p.y > height_ + 1e-12)
        throw std::invalid_argument("Environment: obstacle " + std::to_string(i) + " leaves the workspace bounds");
  }
}

bool Environment::in_free_space(Point p) const {
  if (p.x < 0.0 || p.x > width_ || p.y < 0.0 || p.y > height_) return false;
  for (const auto& ring : obstacles_)
    if (in_polygon(ring, p)) return false;
  return true;
}

std::vector<Point> Environment::rectangle(double x0, double y0, double x1, double y1) {
  if (!(x0 < x1) || !(y0 < y1)) throw std::invalid_argument("Environment::rectangle: degenerate corners");
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

nlohmann::ordered_json Environment::to_json() const {
  nlohmann::ordered_json j;
  j["bounds"] = {width_, height_};
  j["obstacles"] = nlohmann::ordered_json::array();
  for (const auto& ring : obstacles_) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const Point& p : ring) r.push_back({p.x, p.y});
    j["obstacles"].push_back(std::move(r));
  }
  j["density"] = density_.to_json();
  return j;
}

Environment Environment::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("bounds") || !j.at("bounds").is_array() || j.at("bounds").size() != 2)
    throw std::invalid_argument("environment: \"bounds\" must be a [width, height] array");
  const double w = j.at("bounds")[0].get<double>();
  const double h = j.at("bounds")[1].get<double>();
  std::vector<std::vector<Point>> obstacles;
  if (j.contains("obstacles")) {
    if (!j.at("obstacles").is_array()) throw std::invalid_argument("environment: \"obstacles\" must be an array");
    for (const auto& ring : j.at("obstacles")) {
      std::vector<Point> r;
      for (const auto& p : ring) {
        if (!p.is_array() || p.size() != 2)
          throw std::invalid_argument("environment: obstacle vertices must be [x, y] pairs");
        r.push_back({p[0].get<double>(), p[1].get<double>()});
      }
      obstacles.push_back(std::move(r));
    }
  }
  Density d = j.contains("density") ? Density::from_json(j.at("density")) : Density::uniform();
  return Environment(w, h, std::move(obstacles), std::move(d));
}

// --- FineGrid -------------------------------------------------------------------

FineGrid build_fine_grid(const Environment& env, double res) {
  if (!(res > 0.0)) throw std::invalid_argument("build_fine_grid: resolution must be positive");
  FineGrid fg;
  fg.res = res;
  fg.nx = clipped_count(env.width(), res);
  fg.ny = clipped_count(env.height(), res);
  fg.node_at.assign(static_cast<std::size_t>(fg.nx) * fg.ny, -1);
  std::vector<double> raw;
  for (int iy = 0; iy < fg.ny; ++iy)
    for (int ix = 0; ix < fg.nx; ++ix) {
      const Point c = clipped_center(ix, iy, res, env.width(), env.height());
      if (!env.in_free_space(c)) continue;
      const int cell = iy * fg.nx + ix;
      fg.node_at[static_cast<std::size_t>(cell)] = fg.node_count();
      fg.cell_of.push_back(cell);
      fg.centers.push_back(c);
      raw.push_back(env.density().value(c.x, c.y) * clipped_area(ix, iy, res, env.width(), env.height()));
    }
  double total = 0.0;
  for (double v : raw) total += v;
  if (!fg.centers.empty()) {
    if (!(total > 0.0)) throw std::runtime_error("build_fine_grid: density vanishes on the free space");
    fg.mass.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) fg.mass[i] = raw[i] / total;
  }
  return fg;
}

bool FineGrid::connected() const {
  if (node_count() <= 1) return true;
  std::vector<char> seen(static_cast<std::size_t>(node_count()), 0);
  std::queue<int> bfs;
  bfs.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!bfs.empty()) {
    const int u = bfs.front();
    bfs.pop();
    for_each_neighbor(*this, u, [&](int v, double) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++reached;
        bfs.push(v);
      }
    });
  }
  return reached == node_count();
}

int FineGrid::snap(Point p) const {
  int best = -1;
  double best_d2 = kInf;
  for (int i = 0; i < node_count(); ++i) {
    const double dx = centers[static_cast<std::size_t>(i)].x - p.x;
    const double dy = centers[static_cast<std::size_t>(i)].y - p.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) {  // strict: ties keep the smaller node id
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

std::vector<double> FineGrid::distances_from(const std::vector<std::pair<int, double>>& sources) const {
  std::vector<double> dist(static_cast<std::size_t>(node_count()), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  for (const auto& [node, offset] : sources) {
    if (node < 0 || node >= node_count())
      throw std::invalid_argument("FineGrid::distances_from: source node " + std::to_string(node) + " out of range");
    if (offset < dist[static_cast<std::size_t>(node)]) {
      dist[static_cast<std::size_t>(node)] = offset;
      pq.push({offset, node});
    }
  }
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    for_each_neighbor(*this, u, [&](int v, double w) {
      const double nd = d + w;
      if (nd < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = nd;
        pq.push({nd, v});
      }
    });
  }
  return dist;
}

FineGrid::Labeled FineGrid::labeled_distances(const std::vector<int>& source_nodes) const {
  Labeled out;
  out.dist.assign(static_cast<std::size_t>(node_count()), kInf);
  out.label.assign(static_cast<std::size_t>(node_count()), -1);
  using Item = std::tuple<double, int, int>;  // (distance, source index, node)
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  for (std::size_t i = 0; i < source_nodes.size(); ++i) {
    const int node = source_nodes[i];
    if (node < 0 || node >= node_count())
      throw std::invalid_argument("FineGrid::labeled_distances: source node " + std::to_string(node) +
                                  " out of range");
    const std::size_t s = static_cast<std::size_t>(node);
    if (out.label[s] < 0) {  // sources seeded ascending: first one wins a shared node
      out.dist[s] = 0.0;
      out.label[s] = static_cast<int>(i);
      pq.push({0.0, static_cast<int>(i), node});
    }
  }
  while (!pq.empty()) {
    const auto [d, lab, u] = pq.top();
    pq.pop();
    const std::size_t su = static_cast<std::size_t>(u);
    if (d != out.dist[su] || lab != out.label[su]) continue;  // stale entry
    for_each_neighbor(*this, u, [&](int v, double w) {
      const std::size_t sv = static_cast<std::size_t>(v);
      const double nd = d + w;
      if (nd < out.dist[sv] || (nd == out.dist[sv] && lab < out.label[sv])) {
        out.dist[sv] = nd;
        out.label[sv] = lab;
        pq.push({nd, lab, v});
      }
    });
  }
  return out;
}

// --- Discretization ---------------------------------------------------------------

nlohmann::ordered_json Discretization::sidecar_json() const {
  nlohmann::ordered_json j;
  j["dispersion"] = dispersion;
  j["sample_coords"] = nlohmann::ordered_json::array();
  for (const Point& p : samples) j["sample_coords"].push_back({p.x, p.y});
  return j;
}

Discretization grid_sample(const Environment& env, double cell_size, int fine_factor) {
  if (!(cell_size > 0.0)) throw std::invalid_argument("grid_sample: cell_size must be positive");
  if (fine_factor < 4) throw std::invalid_argument("grid_sample: fine_factor must be at least 4");

  Discretization d;
  d.cell_size = cell_size;
  d.fine = build_fine_grid(env, cell_size / fine_factor);
  if (d.fine.node_count() == 0) throw std::runtime_error("grid_sample: no free space at the fine resolution");
  if (!d.fine.connected())
    throw std::runtime_error(
        "grid_sample: the discretized free space is disconnected; use a smaller cell size or check the obstacles");

  const int cx = clipped_count(env.width(), cell_size);
  const int cy = clipped_count(env.height(), cell_size);
  for (int iy = 0; iy < cy; ++iy)
    for (int ix = 0; ix < cx; ++ix) {
      const Point c = clipped_center(ix, iy, cell_size, env.width(), env.height());
      if (env.in_free_space(c)) d.samples.push_back(c);
    }
  if (d.samples.empty())
    throw std::runtime_error("grid_sample: no sample centers lie in free space; use a smaller cell size");

  d.sample_node.reserve(d.samples.size());
  for (const Point& s : d.samples) d.sample_node.push_back(d.fine.snap(s));

  const FineGrid::Labeled lab = d.fine.labeled_distances(d.sample_node);
  d.fine_owner = lab.label;
  d.dispersion = 0.0;
  for (int z = 0; z < d.fine.node_count(); ++z) {
    if (lab.label[static_cast<std::size_t>(z)] < 0)
      throw std::runtime_error("grid_sample: free space is unreachable from the samples; use a smaller cell size");
    d.dispersion = std::max(d.dispersion, lab.dist[static_cast<std::size_t>(z)]);
  }

  d.weights.assign(d.samples.size(), 0.0);
  for (int z = 0; z < d.fine.node_count(); ++z)
    d.weights[static_cast<std::size_t>(lab.label[static_cast<std::size_t>(z)])] += d.fine.mass[static_cast<std::size_t>(z)];

  const std::size_t n = d.samples.size();
  d.distance.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> dist = d.fine.distances_from({{d.sample_node[i], 0.0}});
    for (std::size_t j = 0; j < n; ++j) d.distance[i][j] = dist[static_cast<std::size_t>(d.sample_node[j])];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::min(d.distance[i][j], d.distance[j][i]);
      d.distance[i][j] = v;
      d.distance[j][i] = v;
    }
  return d;
}

std::vector<double> vertex_weights(const Discretization& disc) {
  std::vector<double> w(disc.samples.size(), 0.0);
  for (int z = 0; z < disc.fine.node_count(); ++z) {
    const int owner = disc.fine_owner[static_cast<std::size_t>(z)];
    w[static_cast<std::size_t>(owner)] += disc.fine.mass[static_cast<std::size_t>(z)];
  }
  return w;
}

MetricGraph build_coverage_graph(const Discretization& disc, Sensing f) {
  const std::size_t n = disc.samples.size();
  std::vector<double> cost(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = sensing_cost(f, disc.distance[i][j]);
  try {
    return MetricGraph::from_cost_matrix(disc.weights, cost);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("build_coverage_graph: geodesic distances are metrically inconsistent: ") +
                             e.what());
  }
}

// --- Continuous queries --------------------------------------------------------------

double geodesic_distance(const Environment& env, Point p, Point q, double fine_resolution) {
  if (!env.in_free_space(p)) throw std::invalid_argument("geodesic_distance: start point is not in free space");
  if (!env.in_free_space(q)) throw std::invalid_argument("geodesic_distance: end point is not in free space");
  if (p.x == q.x && p.y == q.y) return 0.0;
  const FineGrid fg = build_fine_grid(env, fine_resolution);
  int a = fg.snap(p);
  int b = fg.snap(q);
  if (a < 0 || b < 0) throw std::runtime_error("geodesic_distance: no free lattice cells at this resolution");
  Point pa = p, pb = q;
  if (b < a) {  // canonical direction keeps the result exactly symmetric
    std::swap(a, b);
    std::swap(pa, pb);
  }
  const Point ca = fg.centers[static_cast<std::size_t>(a)];
  const Point cb = fg.centers[static_cast<std::size_t>(b)];
  const double lead = std::hypot(pa.x - ca.x, pa.y - ca.y);
  const double tail = std::hypot(pb.x - cb.x, pb.y - cb.y);
  const double grid = fg.distances_from({{a, 0.0}})[static_cast<std::size_t>(b)];
  if (!std::isfinite(grid)) throw std::runtime_error("geodesic_distance: points are not connected in free space");
  return lead + grid + tail;
}

double continuous_cost(const Environment& env, const std::vector<Point>& robots, Sensing f, double fine_resolution) {
  if (robots.empty()) throw std::invalid_argument("continuous_cost: robot list is empty");
  for (std::size_t i = 0; i < robots.size(); ++i)
    if (!env.in_free_space(robots[i]))
      throw std::invalid_argument("continuous_cost: robot " + std::to_string(i) + " is not in free space");
  const FineGrid fg = build_fine_grid(env, fine_resolution);
  if (fg.node_count() == 0) throw std::runtime_error("continuous_cost: no free space at this resolution");
  std::vector<std::pair<int, double>> sources;
  for (const Point& r : robots) {
    const int node = fg.snap(r);
    const Point c = fg.centers[static_cast<std::size_t>(node)];
    sources.push_back({node, std::hypot(r.x - c.x, r.y - c.y)});
  }
  const std::vector<double> dist = fg.distances_from(sources);
  double h = 0.0;
  for (int z = 0; z < fg.node_count(); ++z) {
    const double dz = dist[static_cast<std::size_t>(z)];
    if (!std::isfinite(dz)) throw std::runtime_error("continuous_cost: free space is not fully reachable");
    h += fg.mass[static_cast<std::size_t>(z)] * sensing_cost(f, dz);
  }
  return h;
}

double continuous_cost(const Discretization& disc, const std::vector<VertexId>& robot_vertices, Sensing f) {
  if (robot_vertices.empty()) throw std::invalid_argument("continuous_cost: robot list is empty");
  std::vector<std::pair<int, double>> sources;
  for (VertexId v : robot_vertices) {
    if (v < 0 || v >= static_cast<VertexId>(disc.samples.size()))
      throw std::invalid_argument("continuous_cost: vertex " + std::to_string(v) + " out of range");
    sources.push_back({disc.sample_node[static_cast<std::size_t>(v)], 0.0});
  }
  const std::vector<double> dist = disc.fine.distances_from(sources);
  double h = 0.0;
  for (int z = 0; z < disc.fine.node_count(); ++z) {
    const double dz = dist[static_cast<std::size_t>(z)];
    if (!std::isfinite(dz)) throw std::runtime_error("continuous_cost: free space is not fully reachable");
    h += disc.fine.mass[static_cast<std::size_t>(z)] * sensing_cost(f, dz);
  }
  return h;
}

}  // namespace covctl
