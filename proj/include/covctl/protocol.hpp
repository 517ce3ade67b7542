#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "covctl/metric_graph.hpp"
#include "covctl/partition.hpp"
#include "covctl/solvers.hpp"
#include "json.hpp"

namespace covctl {

// --- Local move-change estimates -------------------------------------------
//
// All four estimators see only the acting robot's cell, its neighbors'
// positions and cells, and the candidate vertex — the information available
// to a robot in the message model. `neighbors` comes from neighbor_sets().

// Change when robot `robot` relocates to v inside its own cell, evaluated over
// the vertices owned by the robot and its neighbors. With radius factor 4 this
// equals the exact objective change (no vertex outside the pool changes
// server), which the test suite checks against global recomputation.
double compute_delta(const MetricGraph& g, const Configuration& q, const PartitionAssignment& part,
                     const std::vector<std::vector<int>>& neighbors, int robot, VertexId v);

// Change from adding a fresh robot at v: sum over cells j of the improvement
// on vertices of W_j strictly closer to v than to their current server.
// Always <= 0. `include_own_cell` controls whether j ranges over the origin's
// own cell as well as its neighbors (the default; turning it off drops the
// origin's own vertices from the estimate, for ablation).
double compute_rho(const MetricGraph& g, const Configuration& q, const PartitionAssignment& part,
                   const std::vector<std::vector<int>>& neighbors, int robot, VertexId v,
                   bool include_own_cell = true);

// Cost for robot `robot` (a direct neighbor of `origin`) to vacate its cell in
// a single-hop exchange: origin moves to v, `robot` backfills the origin's
// position. Vertices of the robot's cell not captured by v get re-served by
// the cheapest of the robot's neighbors' positions or v. Always >= 0.
double compute_ell_v(const MetricGraph& g, const Configuration& q, const PartitionAssignment& part,
                     const std::vector<std::vector<int>>& neighbors, int robot, int origin, VertexId v);

// Cost for robot `robot` to vacate its cell entirely, re-serving every owned
// vertex by the cheapest neighbor position. Requires at least one neighbor.
// Always >= 0.
double compute_ell(const MetricGraph& g, const Configuration& q, const PartitionAssignment& part,
                   const std::vector<std::vector<int>>& neighbors, int robot);

// --- Termination certificate ------------------------------------------------

struct SwapWitness {
  bool ok = true;       // true: no single relocation improves by >= eps0
  int robot = -1;       // witness fields valid when !ok: the best improving swap
  VertexId vertex = -1;
  double gain = 0.0;
};

// Exhaustive scan of all (robot, vertex) single relocations against the full
// objective. Returns ok=false with the minimum-gain witness (ties: smaller
// robot UID, then smaller vertex id) when some gain <= -eps0 exists.
SwapWitness verify_no_improving_swap(const MetricGraph& g, const Configuration& q, double eps0);

// --- Trace ------------------------------------------------------------------

struct TraceEvent {
  long step{};
  std::string kind;  // type1-move | type2-single-hop | type2-multi-hop |
                     // message-sent | wave-rejected | completion
  nlohmann::ordered_json data;
};

struct WaveStats {
  long wave_id{};
  int origin{};
  long proposals{};  // proposal messages sent
  long responses{};  // acceptance + rejection messages sent
  long acks{};       // acknowledgment relays on the winning path
  bool accepted{};
  double total_change{};  // valid when accepted
};

struct MoveShares {
  long type1{};
  long type2_single{};
  long type2_multi{};
};

struct ProtocolTrace {
  std::vector<TraceEvent> events;
  std::vector<double> cost_curve;         // objective after each accepted move
  std::vector<double> accepted_changes;   // estimate the move was accepted on
  std::vector<double> realized_changes;   // recomputed global change
  std::vector<WaveStats> waves;
  MoveShares shares;
  long messages_total{};

  void write_jsonl(std::ostream& out) const;  // one event per line
  nlohmann::ordered_json summary() const;     // move shares + message totals
};

// --- Wave simulation ---------------------------------------------------------

struct WaveOutcome {
  bool accepted = false;
  VertexId vertex = -1;      // proposed vertex of the winning acceptance
  double total_change = 0.0;
  int acceptor = -1;
  int acceptor_counter = 0;  // 1 = single-hop exchange, >1 = multi-hop chain
  std::vector<int> path;     // origin .. acceptor along the proposal tree
  long proposals = 0;
  long responses = 0;
};

// Runs one proposal wave from `origin` over the current configuration without
// executing any move. Deterministic synchronous rounds: messages sent in round
// r arrive together in round r+1; each robot adopts as parent the proposal
// with the smallest counter (ties: smaller sender UID) among its first-round
// receipts and answers every later duplicate with a rejection. Direct
// neighbors of the origin evaluate the single-hop exchange, farther robots the
// chain variant; a robot that cannot accept forwards the proposal to its
// non-parent neighbors and aggregates their responses (minimum total change,
// ties to the smaller acceptor UID). When `trace` is given, every message is
// appended to it as a message-sent event tagged with `wave_id`.
WaveOutcome probe_wave(const MetricGraph& g, const Configuration& q, const PartitionAssignment& part,
                       const std::vector<std::vector<int>>& neighbors, int origin, double eps0,
                       bool rho_includes_own_cell = true, ProtocolTrace* trace = nullptr, long wave_id = 0);

// --- Simulator ---------------------------------------------------------------

struct DistributedOptions {
  double eps0 = 0.0;           // must be > 0
  double radius_factor = 4.0;  // neighbor rule factor, 4 or 2
  bool rho_includes_own_cell = true;
};

// Deterministic single-threaded simulator of the token-passing coverage
// algorithm. Robots take turns by UID; an active robot first tries the best
// in-cell relocation (accepted when its estimate is <= -eps0), otherwise
// launches a proposal wave; a robot whose turn produces no move deactivates.
// Any accepted move reactivates every robot. Terminates when all robots are
// inactive, which is guaranteed because each accepted move lowers the
// objective by at least eps0.
class DistributedSimulator {
 public:
  enum class Outcome { moved_type1, moved_type2_single, moved_type2_multi, deactivated, all_inactive };

  DistributedSimulator(const MetricGraph& g, Configuration init, DistributedOptions opt);

  // Gives the token to the next active robot and plays its turn. Returns
  // all_inactive (and changes nothing) once every robot has deactivated.
  Outcome step();
  bool finished() const;
  SolveResult run();  // steps to termination and packages the result

  const Configuration& config() const { return config_; }
  double cost() const { return cost_; }
  const std::vector<bool>& active() const { return active_; }
  const ProtocolTrace& trace() const { return trace_; }
  ProtocolTrace take_trace() { return std::move(trace_); }

 private:
  void record_move(const std::string& kind, nlohmann::ordered_json data, double accepted_change, double cost_before);

  const MetricGraph& graph_;
  DistributedOptions opt_;
  Configuration config_;
  double cost_;
  std::vector<bool> active_;
  int token_ = 0;
  long steps_ = 0;
  long accepted_moves_ = 0;
  ProtocolTrace trace_;
  std::vector<std::pair<Configuration, double>> history_;
};

// Convenience wrapper: simulate to termination and return the result with the
// full trace.
std::pair<SolveResult, ProtocolTrace> run_distributed(const MetricGraph& g, Configuration init,
                                                      const DistributedOptions& opt);

}  // namespace covctl
