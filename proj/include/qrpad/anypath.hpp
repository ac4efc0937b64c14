#pragma once

#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "qrpad/netmodel.hpp"

namespace qrpad {

/// Sentinel for "no route to the destination".
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

inline bool is_reachable(double cost) { return cost != kUnreachable; }

/// A substrate restricted to a subset of its links. Holds a reference to the
/// network, which must outlive the view.
class SubstrateView {
 public:
  explicit SubstrateView(const SubstrateNetwork& net);
  SubstrateView(const SubstrateNetwork& net, std::vector<bool> enabled_links);

  const SubstrateNetwork& network() const { return *net_; }
  std::size_t node_count() const { return net_->node_count(); }
  bool enabled(LinkIndex l) const { return enabled_[l]; }
  std::vector<LinkIndex> enabled_links() const;

 private:
  const SubstrateNetwork* net_;
  std::vector<bool> enabled_;
};

/// Keeps only links with at least `bw` available bandwidth.
SubstrateView bandwidth_subgraph(const SubstrateNetwork& net, int bw);

/// Dijkstra toward `dst` with link weight d/rho. Unreachable nodes get kUnreachable.
std::vector<double> unicast_distances(const SubstrateView& view, NodeIndex dst);

struct DagEdge {
  NodeIndex from;
  NodeIndex to;
  LinkIndex link;
  double delay;
  double pdr;
  int bw;
};

/// Destination-oriented DAG: each surviving link points strictly toward the
/// endpoint closer to the destination.
struct PrunedDag {
  NodeIndex destination = 0;
  std::size_t node_count = 0;
  std::vector<DagEdge> edges;
  std::vector<std::vector<std::size_t>> incoming;  // edge indices by head node
  std::vector<std::vector<std::size_t>> outgoing;  // edge indices by tail node
};

PrunedDag prune(const SubstrateView& view, NodeIndex dst);
/// Same, reusing precomputed unicast distances.
PrunedDag prune(const SubstrateView& view, NodeIndex dst, std::span<const double> distances);

bool is_acyclic(const PrunedDag& dag);

struct ForwarderLink {
  double pdr;
  double delay;
};

struct HyperlinkMetrics {
  double pdr;    // probability that at least one receiver gets the packet
  double delay;  // slowest member link
  double cost;   // delay / pdr
};

/// Requires a non-empty forwarding set.
HyperlinkMetrics hyperlink_metrics(std::span<const ForwarderLink> members);

/// Probability that member m is the actual relay given delivery, in priority order.
std::vector<double> forwarder_weights(std::span<const double> pdrs);

struct Forwarder {
  NodeIndex receiver;
  LinkIndex link;
  double delay;
  double pdr;
};

struct Hyperlink {
  NodeIndex transmitter = 0;
  std::vector<Forwarder> forwarders;  // highest priority first
};

struct AnypathRouteTable {
  NodeIndex destination = 0;
  std::vector<Hyperlink> forwarding;
  std::vector<double> cost;  // expected anypath transmission time

  bool reachable(NodeIndex n) const { return is_reachable(cost[n]); }
};

/// Shortest-anypath settlement over a pruned DAG (destination first, ascending
/// cost). A settled neighbour is appended to a predecessor's forwarding set
/// whenever the predecessor's cost is larger, and the predecessor's cost is
/// recomputed from the enlarged set.
AnypathRouteTable anypath_routes(const PrunedDag& dag);

/// Cost of leaving `transmitter` through `forwarders`, given the remaining
/// cost of every node.
double hyperlink_eatt(std::span<const Forwarder> forwarders, std::span<const double> cost);

class UnreachableSource : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RouteClosure {
  std::vector<NodeIndex> nodes;  // sorted
  std::vector<LinkIndex> links;  // sorted, distinct
  std::vector<Hyperlink> hyperlinks;  // in discovery order from the source
};

/// Everything reachable from `src` by following forwarding sets. Empty when
/// src is the destination. Throws UnreachableSource when src has no route.
RouteClosure route_closure(const AnypathRouteTable& table, NodeIndex src);

}  // namespace qrpad
