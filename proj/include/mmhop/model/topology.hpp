#pragma once

#include <map>
#include <tuple>
#include <vector>

namespace mmhop {

struct Edge {
  int from = 0;
  int to = 0;
  double distance_m = 0.0;
};

// Directed graph over node ids: 0 is the MBS, 1..B the SCBSs, B+1.. the UEs.
// Only base stations transmit.
class Topology {
 public:
  Topology() = default;
  // Throws ValidationError when the structural invariants do not hold.
  Topology(int num_scbs, int num_ues, std::vector<Edge> edges);

  int num_scbs() const { return num_scbs_; }
  int num_ues() const { return num_ues_; }
  int num_nodes() const { return 1 + num_scbs_ + num_ues_; }
  int num_bs() const { return 1 + num_scbs_; }
  bool is_bs(int node) const { return node >= 0 && node <= num_scbs_; }
  bool is_ue(int node) const { return node > num_scbs_ && node < num_nodes(); }

  const std::vector<Edge>& edges() const { return edges_; }
  bool has_edge(int from, int to) const;
  // Index into edges(), or -1.
  int edge_index(int from, int to) const;
  const Edge& edge(int from, int to) const;
  const std::vector<int>& successors(int node) const { return succ_[node]; }

 private:
  int num_scbs_ = 0;
  int num_ues_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> succ_;
  std::map<std::pair<int, int>, int> index_;
};

struct Path {
  std::vector<int> hops;

  int num_hops() const { return static_cast<int>(hops.size()) - 1; }
  int first_relay() const { return hops.size() > 2 ? hops[1] : -1; }
  bool operator==(const Path&) const = default;
  auto operator<=>(const Path&) const = default;
};

// Throws ValidationError unless the path starts at the MBS, ends at `dst`,
// follows edges and repeats no node.
void validate_path(const Topology& topo, const Path& path, int dst);

struct Flow {
  int id = 0;
  int destination = 0;
  std::vector<Path> candidate_paths;
  double mean_arrival_bits = 0.0;  // per slot
  double rate_cap_bits = 0.0;      // per slot

  void validate(const Topology& topo) const;
};

// Interior nodes of a and b are disjoint.
bool node_disjoint(const Path& a, const Path& b);

// Up to `max_paths` pairwise node-disjoint simple paths from src to dst.
// Prefers more paths, then fewer total hops, then lexicographic order; the
// result is sorted by hop count, then node sequence.
std::vector<Path> enumerate_disjoint_paths(const Topology& topo, int src, int dst,
                                           int max_paths);

// Transmit powers p_(i,j)^f with per-node budgets.
class PowerVector {
 public:
  PowerVector() = default;
  explicit PowerVector(std::vector<double> budgets_w);

  void set(int from, int to, int flow, double watts);
  double get(int from, int to, int flow) const;
  double node_total(int node) const;
  double budget(int node) const { return budgets_[node]; }
  const std::vector<double>& budgets() const { return budgets_; }
  const std::map<std::tuple<int, int, int>, double>& entries() const { return p_; }

  // True when every entry is >= 0 and each node is within budget + tol.
  bool within_budgets(double tol = 1e-9) const;

 private:
  std::vector<double> budgets_;
  std::map<std::tuple<int, int, int>, double> p_;
};

}  // namespace mmhop
