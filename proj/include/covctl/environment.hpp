#pragma once

#include <array>
#include <vector>

#include "covctl/metric_graph.hpp"
#include "json.hpp"

namespace covctl {

struct Point {
  double x{};
  double y{};
};

// Event density over the free space. Values are unnormalized: discretization
// renormalizes over free space so masses sum to 1, which also implements
// truncation (mass falling in obstacles or outside the bounds is discarded
// and the remainder rescaled).
class Density {
 public:
  struct Gaussian {
    std::array<double, 2> mean{};
    std::array<double, 4> cov{};  // row-major 2x2, symmetric positive definite
    double weight = 1.0;          // mixture coefficient, > 0
  };

  static Density uniform();
  static Density gaussian(std::array<double, 2> mean, std::array<double, 4> cov);
  static Density mixture(std::vector<Gaussian> components);

  bool is_uniform() const { return components_.empty(); }
  const std::vector<Gaussian>& components() const { return components_; }
  double value(double x, double y) const;  // unnormalized, >= 0

  nlohmann::ordered_json to_json() const;
  static Density from_json(const nlohmann::json& j);

 private:
  Density() = default;
  std::vector<Gaussian> components_;  // empty = uniform
};

// Rectangular workspace [0,width] x [0,height] minus polygonal obstacles.
// Obstacle interiors and boundaries are blocked; the outer boundary is free.
// Free-space connectivity is not decidable here; it is verified when the
// environment is discretized.
class Environment {
 public:
  Environment(double width, double height, std::vector<std::vector<Point>> obstacles, Density density);

  double width() const { return width_; }
  double height() const { return height_; }
  const std::vector<std::vector<Point>>& obstacles() const { return obstacles_; }
  const Density& density() const { return density_; }

  bool in_free_space(Point p) const;

  nlohmann::ordered_json to_json() const;
  static Environment from_json(const nlohmann::json& j);

  // Axis-aligned rectangular obstacle as a 4-point ring.
  static std::vector<Point> rectangle(double x0, double y0, double x1, double y1);

 private:
  double width_;
  double height_;
  std::vector<std::vector<Point>> obstacles_;
  Density density_;
};

// Dense regular lattice of free cells used for geodesics and quadrature.
// Cells have pitch `res`; boundary cells are clipped to the workspace and
// their centers shifted accordingly (on a degenerate axis this collapses to a
// single mid-line row). Step costs are res sideways and res*sqrt(2) on the
// diagonal; a diagonal step requires both flanking orthogonal cells free.
struct FineGrid {
  double res{};
  int nx{};
  int ny{};
  std::vector<int> node_at;     // iy*nx+ix -> node id, -1 when blocked
  std::vector<int> cell_of;     // node id -> iy*nx+ix
  std::vector<Point> centers;   // node id -> cell center
  std::vector<double> mass;     // node id -> density mass, sums to 1

  int node_count() const { return static_cast<int>(centers.size()); }
  bool connected() const;

  // Nearest free node to p by Euclidean distance to cell centers; ties go to
  // the smaller node id. Returns -1 on an empty grid.
  int snap(Point p) const;

  // Dijkstra over the lattice from seeded (node, initial distance) pairs.
  // Unreached nodes keep +infinity.
  std::vector<double> distances_from(const std::vector<std::pair<int, double>>& sources) const;

  struct Labeled {
    std::vector<double> dist;
    std::vector<int> label;  // index into the source list, -1 unreached
  };
  // Multi-source variant that also reports which source serves each node;
  // distance ties resolve to the smaller source index.
  Labeled labeled_distances(const std::vector<int>& source_nodes) const;
};

FineGrid build_fine_grid(const Environment& env, double res);

// Grid discretization of an environment: samples at free coarse-cell centers,
// weights from fine-grid quadrature, raw geodesic distances between samples,
// and the measured dispersion (max over free fine nodes of the geodesic
// distance to the nearest sample).
struct Discretization {
  std::vector<Point> samples;  // row-major over the coarse grid (y outer)
  std::vector<double> weights;
  std::vector<std::vector<double>> distance;  // raw geodesic, symmetric
  double dispersion{};
  double cell_size{};
  FineGrid fine;
  std::vector<int> sample_node;  // sample -> snapped fine node
  std::vector<int> fine_owner;   // fine node -> nearest sample

  nlohmann::ordered_json sidecar_json() const;  // {dispersion, sample_coords}
};

// cell_size is the sample pitch h; the fine grid runs at h/fine_factor.
// Throws when the free space yields no samples or the fine grid is
// disconnected (the error suggests a smaller cell size).
Discretization grid_sample(const Environment& env, double cell_size, int fine_factor = 4);

// Recompute per-sample weights from the fine grid (equals disc.weights).
std::vector<double> vertex_weights(const Discretization& disc);

// Metric graph over the samples with costs f(geodesic distance) and the
// discretization's weights. Validates the metric property on construction.
MetricGraph build_coverage_graph(const Discretization& disc, Sensing f);

// Geodesic distance between two free points: straight hops to the snapped
// lattice nodes plus the lattice shortest path. Symmetric and never below the
// Euclidean distance. Throws when either point is blocked or unreachable.
double geodesic_distance(const Environment& env, Point p, Point q, double fine_resolution);

// Quadrature of f(distance to nearest robot) against the normalized density.
double continuous_cost(const Environment& env, const std::vector<Point>& robots, Sensing f, double fine_resolution);
double continuous_cost(const Discretization& disc, const std::vector<VertexId>& robot_vertices, Sensing f);

}  // namespace covctl
