#include "qrpad/anypath.hpp"

#include <algorithm>
#include <cassert>
#include <queue>
#include <set>
#include <utility>

namespace qrpad {

SubstrateView::SubstrateView(const SubstrateNetwork& net)
    : net_(&net), enabled_(net.link_count(), true) {}

SubstrateView::SubstrateView(const SubstrateNetwork& net, std::vector<bool> enabled_links)
    : net_(&net), enabled_(std::move(enabled_links)) {
  if (enabled_.size() != net.link_count()) {
    throw std::invalid_argument("link mask size does not match the substrate");
  }
}

std::vector<LinkIndex> SubstrateView::enabled_links() const {
  std::vector<LinkIndex> out;
  for (LinkIndex l = 0; l < enabled_.size(); ++l) {
    if (enabled_[l]) out.push_back(l);
  }
  return out;
}

SubstrateView bandwidth_subgraph(const SubstrateNetwork& net, int bw) {
  std::vector<bool> mask(net.link_count());
  for (LinkIndex l = 0; l < net.link_count(); ++l) mask[l] = net.link(l).bw >= bw;
  return SubstrateView(net, std::move(mask));
}

std::vector<double> unicast_distances(const SubstrateView& view, NodeIndex dst) {
  const auto& net = view.network();
  std::vector<double> dist(net.node_count(), kUnreachable);
  using Entry = std::pair<double, NodeIndex>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  dist.at(dst) = 0.0;
  queue.emplace(0.0, dst);
  while (!queue.empty()) {
    auto [d, n] = queue.top();
    queue.pop();
    if (d > dist[n]) continue;
    for (LinkIndex l : net.incident(n)) {
      if (!view.enabled(l)) continue;
      const auto& link = net.link(l);
      const NodeIndex m = link.other(n);
      const double candidate = d + link_cost(link);
      if (candidate < dist[m]) {
        dist[m] = candidate;
        queue.emplace(candidate, m);
      }
    }
  }
  return dist;
}

PrunedDag prune(const SubstrateView& view, NodeIndex dst) {
  const auto dist = unicast_distances(view, dst);
  return prune(view, dst, dist);
}

PrunedDag prune(const SubstrateView& view, NodeIndex dst, std::span<const double> distances) {
  const auto& net = view.network();
  PrunedDag dag;
  dag.destination = dst;
  dag.node_count = net.node_count();
  dag.incoming.resize(dag.node_count);
  dag.outgoing.resize(dag.node_count);
  for (LinkIndex l = 0; l < net.link_count(); ++l) {
    if (!view.enabled(l)) continue;
    const auto& link = net.link(l);
    const double da = distances[link.a];
    const double db = distances[link.b];
    // Links with both endpoints cut off from dst are dropped too (inf == inf).
    if (da == db) continue;
    const NodeIndex from = da > db ? link.a : link.b;
    const NodeIndex to = link.other(from);
    const std::size_t e = dag.edges.size();
    dag.edges.push_back({from, to, l, link.delay, link.pdr, link.bw});
    dag.outgoing[from].push_back(e);
    dag.incoming[to].push_back(e);
  }
  return dag;
}

bool is_acyclic(const PrunedDag& dag) {
  // Kahn's algorithm.
  std::vector<std::size_t> indegree(dag.node_count, 0);
  for (const auto& e : dag.edges) ++indegree[e.to];
  std::vector<NodeIndex> ready;
  for (NodeIndex n = 0; n < dag.node_count; ++n) {
    if (indegree[n] == 0) ready.push_back(n);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const NodeIndex n = ready.back();
    ready.pop_back();
    ++visited;
    for (std::size_t e : dag.outgoing[n]) {
      if (--indegree[dag.edges[e].to] == 0) ready.push_back(dag.edges[e].to);
    }
  }
  return visited == dag.node_count;
}

HyperlinkMetrics hyperlink_metrics(std::span<const ForwarderLink> members) {
  if (members.empty()) throw std::invalid_argument("hyperlink needs at least one forwarder");
  double miss = 1.0;
  double delay = 0.0;
  for (const auto& m : members) {
    miss *= 1.0 - m.pdr;
    delay = std::max(delay, m.delay);
  }
  const double pdr = 1.0 - miss;
  return {pdr, delay, delay / pdr};
}

std::vector<double> forwarder_weights(std::span<const double> pdrs) {
  if (pdrs.empty()) throw std::invalid_argument("forwarder weights need at least one member");
  std::vector<double> weights;
  weights.reserve(pdrs.size());
  double miss = 1.0;  // probability every higher-priority member missed
  for (double p : pdrs) {
    weights.push_back(p * miss);
    miss *= 1.0 - p;
  }
  const double delivered = 1.0 - miss;
  for (double& w : weights) w /= delivered;
  return weights;
}

double hyperlink_eatt(std::span<const Forwarder> forwarders, std::span<const double> cost) {
  std::vector<ForwarderLink> links;
  std::vector<double> pdrs;
  links.reserve(forwarders.size());
  pdrs.reserve(forwarders.size());
  for (const auto& f : forwarders) {
    links.push_back({f.pdr, f.delay});
    pdrs.push_back(f.pdr);
  }
  const auto metrics = hyperlink_metrics(links);
  const auto weights = forwarder_weights(pdrs);
  double remaining = 0.0;
  for (std::size_t m = 0; m < forwarders.size(); ++m) {
    remaining += weights[m] * cost[forwarders[m].receiver];
  }
  return metrics.cost + remaining;
}

AnypathRouteTable anypath_routes(const PrunedDag& dag) {
  AnypathRouteTable table;
  table.destination = dag.destination;
  table.cost.assign(dag.node_count, kUnreachable);
  table.forwarding.resize(dag.node_count);
  for (NodeIndex n = 0; n < dag.node_count; ++n) table.forwarding[n].transmitter = n;
  table.cost.at(dag.destination) = 0.0;

  // Ordered set instead of a heap: costs may also grow under the update rule.
  std::set<std::pair<double, NodeIndex>> queue;
  for (NodeIndex n = 0; n < dag.node_count; ++n) queue.emplace(table.cost[n], n);
  std::vector<bool> queued(dag.node_count, true);

  std::vector<Forwarder> candidate;
  while (!queue.empty()) {
    const auto [settled_cost, settled] = *queue.begin();
    if (!is_reachable(settled_cost)) break;
    queue.erase(queue.begin());
    queued[settled] = false;

    for (std::size_t e : dag.incoming[settled]) {
      const auto& edge = dag.edges[e];
      const NodeIndex n = edge.from;
      if (!(table.cost[n] > table.cost[settled])) continue;
      candidate = table.forwarding[n].forwarders;
      candidate.push_back({settled, edge.link, edge.delay, edge.pdr});
      const double updated = hyperlink_eatt(candidate, table.cost);
      if (queued[n]) {
        queue.erase({table.cost[n], n});
        queue.emplace(updated, n);
      }
      table.cost[n] = updated;
      table.forwarding[n].forwarders = candidate;
    }
  }
  return table;
}

RouteClosure route_closure(const AnypathRouteTable& table, NodeIndex src) {
  if (!table.reachable(src)) {
    throw UnreachableSource("node #" + std::to_string(src) + " has no anypath route to the destination");
  }
  RouteClosure closure;
  if (src == table.destination) return closure;

  std::vector<bool> seen(table.cost.size(), false);
  std::vector<NodeIndex> frontier{src};
  seen[src] = true;
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    const NodeIndex n = frontier[i];
    const auto& hyperlink = table.forwarding[n];
    if (!hyperlink.forwarders.empty()) closure.hyperlinks.push_back(hyperlink);
    for (const auto& f : hyperlink.forwarders) {
      closure.links.push_back(f.link);
      if (!seen[f.receiver]) {
        seen[f.receiver] = true;
        frontier.push_back(f.receiver);
      }
    }
  }
  closure.nodes = std::move(frontier);
  std::sort(closure.nodes.begin(), closure.nodes.end());
  std::sort(closure.links.begin(), closure.links.end());
  closure.links.erase(std::unique(closure.links.begin(), closure.links.end()), closure.links.end());
  return closure;
}

}  // namespace qrpad
