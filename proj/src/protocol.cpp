#include "covctl/protocol.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace covctl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_robot(const Configuration& q, int robot, const char* who) {
  if (robot < 0 || robot >= q.size())
    throw std::invalid_argument(std::string(who) + ": robot UID " + std::to_string(robot) + " out of range");
}

void check_owned(const PartitionAssignment& part, int robot, VertexId v, const char* who) {
  if (v < 0 || v >= static_cast<VertexId>(part.owner.size()) || part.owner[static_cast<std::size_t>(v)] != robot)
    throw std::invalid_argument(std::string(who) + ": vertex " + std::to_string(v) + " is not in robot " +
                                std::to_string(robot) + "'s cell");
}

void append_event(ProtocolTrace& t, const char* kind, nlohmann::ordered_json data) {
  TraceEvent e;
  e.step = static_cast<long>(t.events.size());
  e.kind = kind;
  e.data = std::move(data);
  t.events.push_back(std::move(e));
}

}  // namespace

double compute_delta(const MetricGraph& g, const Configuration& q, const PartitionAssignment& part,
                     const std::vector<std::vector<int>>& neighbors, int robot, VertexId v) {
  check_robot(q, robot, "compute_delta");
  check_owned(part, robot, v, "compute_delta");
  const auto& nbrs = neighbors[static_cast<std::size_t>(robot)];
  const VertexId here = q.at(robot);
  double delta = 0.0;
  auto add_cell = [&](int cell_robot) {
    for (VertexId u : part.members[static_cast<std::size_t>(cell_robot)]) {
      double nbr_min = kInf;
      for (int k : nbrs) nbr_min = std::min(nbr_min, g.cost(u, q.at(k)));
      const double before = std::min(g.cost(u, here), nbr_min);
      const double after = std::min(g.cost(u, v), nbr_min);
      delta += g.weight(u) * (after - before);
    }
  };
  add_cell(robot);
  for (int k : nbrs) add_cell(k);
  return delta;
}

double compute_rho(const MetricGraph& g, const Configuration& q, const PartitionAssignment& part,
                   const std::vector<std::vector<int>>& neighbors, int robot, VertexId v, bool include_own_cell) {
  check_robot(q, robot, "compute_rho");
  check_owned(part, robot, v, "compute_rho");
  double rho = 0.0;
  auto add_cell = [&](int j) {
    const VertexId pos = q.at(j);
    for (VertexId u : part.members[static_cast<std::size_t>(j)]) {
      const double to_v = g.cost(u, v);
      const double cur = g.cost(u, pos);
      if (to_v < cur) rho += g.weight(u) * (to_v - cur);
    }
  };
  if (include_own_cell) add_cell(robot);
  for (int j : neighbors[static_cast<std::size_t>(robot)]) add_cell(j);
  return rho;
}

double compute_ell_v(const MetricGraph& g, const Configuration& q, const PartitionAssignment& part,
                     const std::vector<std::vector<int>>& neighbors, int robot, int origin, VertexId v) {
  check_robot(q, robot, "compute_ell_v");
  check_robot(q, origin, "compute_ell_v");
  const auto& nbrs = neighbors[static_cast<std::size_t>(robot)];
  if (std::find(nbrs.begin(), nbrs.end(), origin) == nbrs.end())
    throw std::invalid_argument("compute_ell_v: robot " + std::to_string(origin) + " is not a neighbor of robot " +
                                std::to_string(robot));
  const VertexId here = q.at(robot);
  double ell = 0.0;
  for (VertexId u : part.members[static_cast<std::size_t>(robot)]) {
    const double cur = g.cost(u, here);
    const double to_v = g.cost(u, v);
    if (to_v < cur) continue;  // captured by v; accounted in rho
    double best = to_v;
    for (int j : nbrs) best = std::min(best, g.cost(u, q.at(j)));
    ell += g.weight(u) * (best - cur);
  }
  return ell;
}

double compute_ell(const MetricGraph& g, const Configuration& q, const PartitionAssignment& part,
                   const std::vector<std::vector<int>>& neighbors, int robot) {
  check_robot(q, robot, "compute_ell");
  const auto& nbrs = neighbors[static_cast<std::size_t>(robot)];
  if (nbrs.empty())
    throw std::invalid_argument("compute_ell: robot " + std::to_string(robot) +
                                " has no neighbors to absorb its cell");
  const VertexId here = q.at(robot);
  double ell = 0.0;
  for (VertexId u : part.members[static_cast<std::size_t>(robot)]) {
    double best = kInf;
    for (int j : nbrs) best = std::min(best, g.cost(u, q.at(j)));
    ell += g.weight(u) * (best - g.cost(u, here));
  }
  return ell;
}

SwapWitness verify_no_improving_swap(const MetricGraph& g, const Configuration& q, double eps0) {
  if (q.size() < 1) throw std::invalid_argument("verify_no_improving_swap: empty configuration");
  if (!(eps0 > 0.0)) throw std::invalid_argument("verify_no_improving_swap: eps0 must be positive");
  const ServiceCosts sc = compute_service_costs(g, q);
  SwapWitness w;
  double best = kInf;
  for (int r = 0; r < q.size(); ++r)
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      const double gain = relocation_gain(g, sc, r, v);
      if (gain < best) {  // strict: ties keep smaller (robot, vertex)
        best = gain;
        w.robot = r;
        w.vertex = v;
        w.gain = gain;
      }
    }
  w.ok = !(best <= -eps0);
  if (w.ok) {
    w.robot = -1;
    w.vertex = -1;
    w.gain = 0.0;
  }
  return w;
}

// --- Wave simulation ----------------------------------------------------------

namespace {

struct WaveMsg {
  int kind;  // 0 proposal, 1 acceptance, 2 rejection
  int sender;
  int receiver;
  int counter = 0;          // proposal hop count
  VertexId vertex = -1;     // acceptance payload
  double total = 0.0;
  int acceptor = -1;
  int acceptor_counter = 0;
};

struct WaveNode {
  bool reached = false;    // adopted a parent (origin starts reached)
  bool responded = false;  // sent its response up (or, for the origin, resolved)
  int parent = -1;
  std::vector<int> children;  // robots this one forwarded the proposal to
  std::size_t responses_in = 0;
  bool has_acc = false;
  double best_total = 0.0;
  VertexId best_vertex = -1;
  int best_acceptor = -1;
  int best_acceptor_counter = 0;
  int best_child = -1;  // response path; -1 when this node accepted itself
};

const char* msg_name(int kind) { return kind == 0 ? "proposal" : kind == 1 ? "acceptance" : "rejection"; }

}  // namespace

WaveOutcome probe_wave(const MetricGraph& g, const Configuration& q, const PartitionAssignment& part,
                       const std::vector<std::vector<int>>& neighbors, int origin, double eps0,
                       bool rho_includes_own_cell, ProtocolTrace* trace, long wave_id) {
  check_robot(q, origin, "probe_wave");
  if (!(eps0 > 0.0)) throw std::invalid_argument("probe_wave: eps0 must be positive");

  WaveOutcome out;
  const auto& origin_nbrs = neighbors[static_cast<std::size_t>(origin)];
  const auto& candidates = part.members[static_cast<std::size_t>(origin)];
  if (origin_nbrs.empty() || candidates.empty()) return out;  // nobody to ask / nothing to propose

  // Candidate list with appearance gains, ascending vertex id.
  std::vector<std::pair<VertexId, double>> gamma;
  gamma.reserve(candidates.size());
  for (VertexId v : candidates) gamma.emplace_back(v, compute_rho(g, q, part, neighbors, origin, v, rho_includes_own_cell));

  const int m = q.size();
  std::vector<WaveNode> nodes(static_cast<std::size_t>(m));
  nodes[static_cast<std::size_t>(origin)].reached = true;

  std::vector<WaveMsg> pending;
  auto send = [&](WaveMsg msg) {
    if (msg.kind == 0)
      ++out.proposals;
    else
      ++out.responses;
    if (trace) {
      nlohmann::ordered_json d;
      d["wave"] = wave_id;
      d["msg"] = msg_name(msg.kind);
      d["from"] = msg.sender;
      d["to"] = msg.receiver;
      if (msg.kind == 0) d["counter"] = msg.counter;
      if (msg.kind == 1) {
        d["vertex"] = msg.vertex;
        d["total_change"] = msg.total;
        d["acceptor"] = msg.acceptor;
      }
      append_event(*trace, "message-sent", std::move(d));
    }
    pending.push_back(msg);
  };

  for (int j : origin_nbrs) {
    nodes[static_cast<std::size_t>(origin)].children.push_back(j);
    send(WaveMsg{0, origin, j, 1});
  }

  auto merge_acceptance = [](WaveNode& n, const WaveMsg& r) {
    if (!n.has_acc || r.total < n.best_total || (r.total == n.best_total && r.acceptor < n.best_acceptor)) {
      n.has_acc = true;
      n.best_total = r.total;
      n.best_vertex = r.vertex;
      n.best_acceptor = r.acceptor;
      n.best_acceptor_counter = r.acceptor_counter;
      n.best_child = r.sender;
    }
  };

  while (!pending.empty()) {
    std::vector<WaveMsg> cur = std::move(pending);
    pending.clear();
    // Simultaneous delivery: receivers in ascending UID order, proposals ahead
    // of responses, proposals by (counter, sender), responses by sender.
    std::stable_sort(cur.begin(), cur.end(), [](const WaveMsg& a, const WaveMsg& b) {
      if (a.receiver != b.receiver) return a.receiver < b.receiver;
      if ((a.kind == 0) != (b.kind == 0)) return a.kind == 0;
      if (a.counter != b.counter) return a.counter < b.counter;
      return a.sender < b.sender;
    });
    std::size_t i = 0;
    while (i < cur.size()) {
      const int k = cur[i].receiver;
      WaveNode& node = nodes[static_cast<std::size_t>(k)];

      // 1. Proposals delivered to k this round.
      std::size_t first = i;
      while (i < cur.size() && cur[i].receiver == k && cur[i].kind == 0) ++i;
      if (i > first) {
        std::size_t adopt = first;  // sorted: smallest (counter, sender) first
        if (node.reached) {
          for (std::size_t p = first; p < i; ++p) send(WaveMsg{2, k, cur[p].sender});
        } else {
          for (std::size_t p = first + 1; p < i; ++p) send(WaveMsg{2, k, cur[p].sender});
          node.reached = true;
          node.parent = cur[adopt].sender;
          const int counter = cur[adopt].counter;

          double best_total = kInf;
          VertexId best_v = -1;
          if (counter == 1) {
            for (const auto& [v, rho] : gamma) {
              const double t = rho + compute_ell_v(g, q, part, neighbors, k, origin, v);
              if (t < best_total) {
                best_total = t;
                best_v = v;
              }
            }
          } else {
            const double ell = compute_ell(g, q, part, neighbors, k);
            for (const auto& [v, rho] : gamma) {
              const double t = rho + ell;
              if (t < best_total) {
                best_total = t;
                best_v = v;
              }
            }
          }
          if (best_v >= 0 && best_total <= -eps0) {
            node.responded = true;
            send(WaveMsg{1, k, node.parent, 0, best_v, best_total, k, counter});
          } else {
            for (int j : neighbors[static_cast<std::size_t>(k)])
              if (j != node.parent) node.children.push_back(j);
            if (node.children.empty()) {
              node.responded = true;
              send(WaveMsg{2, k, node.parent});
            } else {
              for (int j : node.children) send(WaveMsg{0, k, j, counter + 1});
            }
          }
        }
      }

      // 2. Responses delivered to k this round.
      while (i < cur.size() && cur[i].receiver == k) {
        const WaveMsg& r = cur[i];
        ++node.responses_in;
        if (r.kind == 1) merge_acceptance(node, r);
        ++i;
      }
      if (!node.responded && !node.children.empty() && node.responses_in == node.children.size()) {
        node.responded = true;
        if (k == origin) continue;  // resolution read off the origin node below
        if (node.has_acc)
          send(WaveMsg{1, k, node.parent, 0, node.best_vertex, node.best_total, node.best_acceptor,
                       node.best_acceptor_counter});
        else
          send(WaveMsg{2, k, node.parent});
      }
    }
  }

  const WaveNode& root = nodes[static_cast<std::size_t>(origin)];
  if (root.has_acc) {
    out.accepted = true;
    out.vertex = root.best_vertex;
    out.total_change = root.best_total;
    out.acceptor = root.best_acceptor;
    out.acceptor_counter = root.best_acceptor_counter;
    out.path.push_back(origin);
    int cursor = root.best_child;
    while (cursor >= 0) {
      out.path.push_back(cursor);
      cursor = nodes[static_cast<std::size_t>(cursor)].best_child;
    }
  }
  return out;
}

// --- Trace serialization --------------------------------------------------------

void ProtocolTrace::write_jsonl(std::ostream& out) const {
  for (const auto& e : events) {
    nlohmann::ordered_json j;
    j["step"] = e.step;
    j["kind"] = e.kind;
    for (auto it = e.data.begin(); it != e.data.end(); ++it) j[it.key()] = *it;
    out << j.dump() << "\n";
  }
}

nlohmann::ordered_json ProtocolTrace::summary() const {
  long proposals = 0, responses = 0, acks = 0, accepted = 0;
  for (const auto& w : waves) {
    proposals += w.proposals;
    responses += w.responses;
    acks += w.acks;
    if (w.accepted) ++accepted;
  }
  nlohmann::ordered_json j;
  j["moves"] = {{"type1", shares.type1}, {"type2_single", shares.type2_single}, {"type2_multi", shares.type2_multi}};
  j["waves"] = static_cast<long>(waves.size());
  j["waves_accepted"] = accepted;
  j["messages"] = {{"proposals", proposals}, {"responses", responses}, {"acknowledgments", acks}, {"total", messages_total}};
  return j;
}

// --- Simulator -------------------------------------------------------------------

DistributedSimulator::DistributedSimulator(const MetricGraph& g, Configuration init, DistributedOptions opt)
    : graph_(g), opt_(opt), config_(std::move(init)) {
  if (config_.size() < 1) throw std::invalid_argument("DistributedSimulator: configuration is empty");
  for (int i = 0; i < config_.size(); ++i)
    if (config_.at(i) < 0 || config_.at(i) >= g.vertex_count())
      throw std::invalid_argument("DistributedSimulator: robot " + std::to_string(i) + " starts on invalid vertex");
  if (!(opt_.eps0 > 0.0)) throw std::invalid_argument("DistributedSimulator: eps0 must be positive");
  if (!(opt_.radius_factor > 0.0)) throw std::invalid_argument("DistributedSimulator: radius_factor must be positive");
  active_.assign(static_cast<std::size_t>(config_.size()), true);
  cost_ = coverage_cost(graph_, config_);
}

bool DistributedSimulator::finished() const {
  return std::none_of(active_.begin(), active_.end(), [](bool a) { return a; });
}

void DistributedSimulator::record_move(const std::string& kind, nlohmann::ordered_json data, double accepted_change,
                                       double cost_before) {
  const double realized = cost_ - cost_before;
  data["accepted_change"] = accepted_change;
  data["realized_change"] = realized;
  data["cost"] = cost_;
  append_event(trace_, kind.c_str(), std::move(data));
  trace_.cost_curve.push_back(cost_);
  trace_.accepted_changes.push_back(accepted_change);
  trace_.realized_changes.push_back(realized);
  if (kind == "type1-move")
    ++trace_.shares.type1;
  else if (kind == "type2-single-hop")
    ++trace_.shares.type2_single;
  else
    ++trace_.shares.type2_multi;
  history_.emplace_back(config_, cost_);
  ++accepted_moves_;
  std::fill(active_.begin(), active_.end(), true);
}

DistributedSimulator::Outcome DistributedSimulator::step() {
  const int m = config_.size();
  int robot = -1;
  for (int t = 0; t < m; ++t) {
    const int cand = (token_ + t) % m;
    if (active_[static_cast<std::size_t>(cand)]) {
      robot = cand;
      break;
    }
  }
  if (robot < 0) return Outcome::all_inactive;
  token_ = (robot + 1) % m;
  ++steps_;

  const PartitionAssignment part = assign_partitions(graph_, config_);
  // Communication range uses the subdivided radii so that a robot whose cell
  // has shrunk to its own vertex still reaches across its incident edges.
  const auto nbrs = neighbor_sets(graph_, config_, subdivided_radii(graph_, config_, part), opt_.radius_factor);
  const auto& cell = part.members[static_cast<std::size_t>(robot)];
  const VertexId here = config_.at(robot);

  double own_span = 0.0;  // unweighted cell cost; zero means no move can help
  for (VertexId u : cell) own_span += graph_.cost(u, here);
  if (!(own_span > 0.0)) {
    active_[static_cast<std::size_t>(robot)] = false;
    append_event(trace_, "completion", {{"robot", robot}});
    return Outcome::deactivated;
  }

  // In-cell relocation on the neighborhood estimate.
  double best_delta = kInf;
  VertexId best_v = -1;
  for (VertexId v : cell) {
    if (v == here) continue;
    const double d = compute_delta(graph_, config_, part, nbrs, robot, v);
    if (d < best_delta) {  // strict: ties keep the smallest vertex id
      best_delta = d;
      best_v = v;
    }
  }
  if (best_v >= 0 && best_delta <= -opt_.eps0) {
    const double before = cost_;
    config_.positions[static_cast<std::size_t>(robot)] = best_v;
    cost_ = coverage_cost(graph_, config_);
    nlohmann::ordered_json d;
    d["robot"] = robot;
    d["from"] = here;
    d["to"] = best_v;
    record_move("type1-move", std::move(d), best_delta, before);
    return Outcome::moved_type1;
  }

  // Exchange proposal wave.
  if (nbrs[static_cast<std::size_t>(robot)].empty()) {
    active_[static_cast<std::size_t>(robot)] = false;
    append_event(trace_, "completion", {{"robot", robot}});
    return Outcome::deactivated;
  }
  const long wave_id = static_cast<long>(trace_.waves.size());
  const WaveOutcome wave =
      probe_wave(graph_, config_, part, nbrs, robot, opt_.eps0, opt_.rho_includes_own_cell, &trace_, wave_id);
  WaveStats stats;
  stats.wave_id = wave_id;
  stats.origin = robot;
  stats.proposals = wave.proposals;
  stats.responses = wave.responses;
  stats.accepted = wave.accepted;
  stats.total_change = wave.accepted ? wave.total_change : 0.0;

  if (!wave.accepted) {
    trace_.messages_total += wave.proposals + wave.responses;
    trace_.waves.push_back(stats);
    append_event(trace_, "wave-rejected", {{"wave", wave_id}, {"origin", robot}});
    active_[static_cast<std::size_t>(robot)] = false;
    append_event(trace_, "completion", {{"robot", robot}});
    return Outcome::deactivated;
  }

  // Acknowledgments relay down the winning path, then the chain executes:
  // the origin takes the proposed vertex, every later robot backfills its
  // parent's prior position; the acceptor's own position is vacated.
  stats.acks = static_cast<long>(wave.path.size()) - 1;
  for (std::size_t t = 0; t + 1 < wave.path.size(); ++t)
    append_event(trace_, "message-sent", {{"wave", wave_id},
                                          {"msg", "acknowledgment"},
                                          {"from", wave.path[t]},
                                          {"to", wave.path[t + 1]},
                                          {"vertex", wave.vertex}});
  trace_.messages_total += wave.proposals + wave.responses + stats.acks;
  trace_.waves.push_back(stats);

  const double before = cost_;
  std::vector<VertexId> prior;
  prior.reserve(wave.path.size());
  for (int uid : wave.path) prior.push_back(config_.at(uid));
  config_.positions[static_cast<std::size_t>(wave.path[0])] = wave.vertex;
  for (std::size_t t = 1; t < wave.path.size(); ++t)
    config_.positions[static_cast<std::size_t>(wave.path[t])] = prior[t - 1];
  cost_ = coverage_cost(graph_, config_);

  const bool single = wave.acceptor_counter == 1;
  nlohmann::ordered_json d;
  d["wave"] = wave_id;
  d["origin"] = robot;
  d["vertex"] = wave.vertex;
  d["acceptor"] = wave.acceptor;
  d["path"] = wave.path;
  record_move(single ? "type2-single-hop" : "type2-multi-hop", std::move(d), wave.total_change, before);
  return single ? Outcome::moved_type2_single : Outcome::moved_type2_multi;
}

SolveResult DistributedSimulator::run() {
  while (step() != Outcome::all_inactive) {
  }
  SolveResult res;
  res.config = config_;
  res.cost = cost_;
  res.iterations = accepted_moves_;
  res.history = history_;
  return res;
}

std::pair<SolveResult, ProtocolTrace> run_distributed(const MetricGraph& g, Configuration init,
                                                      const DistributedOptions& opt) {
  DistributedSimulator sim(g, std::move(init), opt);
  SolveResult res = sim.run();
  return {std::move(res), sim.take_trace()};
}

}  // namespace covctl
