#include "mmhop/model/topology.hpp"

#include <algorithm>
#include <string>

#include "mmhop/common/error.hpp"

namespace mmhop {

Topology::Topology(int num_scbs, int num_ues, std::vector<Edge> edges)
    : num_scbs_(num_scbs), num_ues_(num_ues), edges_(std::move(edges)) {
  if (num_scbs < 0 || num_ues < 0) throw ValidationError("topology: negative node count");
  succ_.assign(static_cast<std::size_t>(num_nodes()), {});
  std::vector<int> in_deg(static_cast<std::size_t>(num_nodes()), 0);
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const Edge& e = edges_[k];
    if (e.from < 0 || e.from >= num_nodes() || e.to < 0 || e.to >= num_nodes())
      throw ValidationError("topology: edge endpoint out of range");
    if (!is_bs(e.from))
      throw ValidationError("topology: edge source " + std::to_string(e.from) + " is not a BS");
    if (e.from == e.to) throw ValidationError("topology: self loop");
    if (!(e.distance_m >= 1.0)) throw ValidationError("topology: edge distance must be >= 1 m");
    if (!index_.emplace(std::make_pair(e.from, e.to), static_cast<int>(k)).second)
      throw ValidationError("topology: duplicate edge");
    succ_[e.from].push_back(e.to);
    ++in_deg[e.to];
  }
  for (auto& s : succ_) std::sort(s.begin(), s.end());
  if (succ_[0].empty()) throw ValidationError("topology: MBS has no outgoing edge");
  for (int u = num_scbs_ + 1; u < num_nodes(); ++u) {
    if (in_deg[u] == 0)
      throw ValidationError("topology: UE " + std::to_string(u) + " is unreachable");
  }
}

bool Topology::has_edge(int from, int to) const { return edge_index(from, to) >= 0; }

int Topology::edge_index(int from, int to) const {
  auto it = index_.find({from, to});
  return it == index_.end() ? -1 : it->second;
}

const Edge& Topology::edge(int from, int to) const {
  const int k = edge_index(from, to);
  if (k < 0)
    throw ValidationError("topology: no edge " + std::to_string(from) + "->" + std::to_string(to));
  return edges_[static_cast<std::size_t>(k)];
}

void validate_path(const Topology& topo, const Path& path, int dst) {
  if (path.hops.size() < 2) throw ValidationError("path: needs at least one hop");
  if (path.hops.front() != 0) throw ValidationError("path: must start at the MBS");
  if (path.hops.back() != dst) throw ValidationError("path: must end at the destination");
  std::vector<int> seen = path.hops;
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw ValidationError("path: repeated node");
  for (std::size_t k = 0; k + 1 < path.hops.size(); ++k) {
    if (!topo.has_edge(path.hops[k], path.hops[k + 1]))
      throw ValidationError("path: missing edge " + std::to_string(path.hops[k]) + "->" +
                            std::to_string(path.hops[k + 1]));
  }
}

void Flow::validate(const Topology& topo) const {
  if (!topo.is_ue(destination)) throw ValidationError("flow: destination is not a UE");
  if (!(mean_arrival_bits >= 0.0)) throw ValidationError("flow: mean arrival must be >= 0");
  if (!(rate_cap_bits > 0.0)) throw ValidationError("flow: rate cap must be > 0");
  if (candidate_paths.empty()) throw ValidationError("flow: no candidate paths");
  for (const auto& p : candidate_paths) validate_path(topo, p, destination);
  for (std::size_t a = 0; a < candidate_paths.size(); ++a)
    for (std::size_t b = a + 1; b < candidate_paths.size(); ++b)
      if (!node_disjoint(candidate_paths[a], candidate_paths[b]))
        throw ValidationError("flow: candidate paths are not node-disjoint");
}

bool node_disjoint(const Path& a, const Path& b) {
  for (std::size_t i = 1; i + 1 < a.hops.size(); ++i)
    for (std::size_t j = 1; j + 1 < b.hops.size(); ++j)
      if (a.hops[i] == b.hops[j]) return false;
  return true;
}

namespace {

constexpr std::size_t kMaxSimplePaths = 200000;

void dfs_paths(const Topology& topo, int node, int dst, std::vector<int>& stack,
               std::vector<char>& on_stack, std::vector<Path>& out) {
  if (node == dst) {
    out.push_back(Path{stack});
    return;
  }
  // UEs never forward.
  if (!topo.is_bs(node)) return;
  for (int nxt : topo.successors(node)) {
    if (on_stack[nxt]) continue;
    if (out.size() >= kMaxSimplePaths)
      throw ValidationError("enumerate_disjoint_paths: too many simple paths");
    on_stack[nxt] = 1;
    stack.push_back(nxt);
    dfs_paths(topo, nxt, dst, stack, on_stack, out);
    stack.pop_back();
    on_stack[nxt] = 0;
  }
}

struct Best {
  std::vector<int> pick;
  int hops = 0;
};

void search(const std::vector<Path>& paths, std::size_t from, int limit,
            std::vector<int>& pick, int hops, std::vector<char>& used, Best& best) {
  const bool better =
      pick.size() > best.pick.size() ||
      (pick.size() == best.pick.size() && hops < best.hops);
  if (better) best = Best{pick, hops};
  if (static_cast<int>(pick.size()) == limit) return;
  for (std::size_t k = from; k < paths.size(); ++k) {
    const auto& h = paths[k].hops;
    bool clash = false;
    for (std::size_t i = 1; i + 1 < h.size(); ++i) clash = clash || used[h[i]];
    if (clash) continue;
    for (std::size_t i = 1; i + 1 < h.size(); ++i) used[h[i]] = 1;
    pick.push_back(static_cast<int>(k));
    search(paths, k + 1, limit, pick, hops + paths[k].num_hops(), used, best);
    pick.pop_back();
    for (std::size_t i = 1; i + 1 < h.size(); ++i) used[h[i]] = 0;
  }
}

}  // namespace

std::vector<Path> enumerate_disjoint_paths(const Topology& topo, int src, int dst,
                                           int max_paths) {
  if (src != 0) throw ValidationError("enumerate_disjoint_paths: source must be the MBS");
  if (!topo.is_ue(dst)) throw ValidationError("enumerate_disjoint_paths: destination must be a UE");
  if (max_paths <= 0) return {};

  std::vector<Path> all;
  std::vector<int> stack{src};
  std::vector<char> on_stack(static_cast<std::size_t>(topo.num_nodes()), 0);
  on_stack[src] = 1;
  dfs_paths(topo, src, dst, stack, on_stack, all);
  std::sort(all.begin(), all.end(), [](const Path& a, const Path& b) {
    if (a.hops.size() != b.hops.size()) return a.hops.size() < b.hops.size();
    return a.hops < b.hops;
  });

  // A direct MBS->UE edge has no interior node and is compatible with any set.
  Best best;
  std::vector<int> pick;
  std::vector<char> used(static_cast<std::size_t>(topo.num_nodes()), 0);
  search(all, 0, max_paths, pick, 0, used, best);

  std::vector<Path> out;
  for (int k : best.pick) out.push_back(all[static_cast<std::size_t>(k)]);
  return out;
}

PowerVector::PowerVector(std::vector<double> budgets_w) : budgets_(std::move(budgets_w)) {
  for (double b : budgets_)
    if (!(b >= 0.0)) throw ValidationError("power: budget must be >= 0");
}

void PowerVector::set(int from, int to, int flow, double watts) {
  if (from < 0 || from >= static_cast<int>(budgets_.size()))
    throw ValidationError("power: transmitter is not a BS");
  if (!(watts >= 0.0)) throw ValidationError("power: negative power");
  p_[{from, to, flow}] = watts;
}

double PowerVector::get(int from, int to, int flow) const {
  auto it = p_.find({from, to, flow});
  return it == p_.end() ? 0.0 : it->second;
}

double PowerVector::node_total(int node) const {
  double s = 0.0;
  for (const auto& [key, w] : p_)
    if (std::get<0>(key) == node) s += w;
  return s;
}

bool PowerVector::within_budgets(double tol) const {
  std::vector<double> tot(budgets_.size(), 0.0);
  for (const auto& [key, w] : p_) {
    if (w < 0.0) return false;
    tot[static_cast<std::size_t>(std::get<0>(key))] += w;
  }
  for (std::size_t i = 0; i < tot.size(); ++i)
    if (tot[i] > budgets_[i] + tol) return false;
  return true;
}

}  // namespace mmhop
