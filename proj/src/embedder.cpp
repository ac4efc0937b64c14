#include "qrpad/embedder.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace qrpad {

bool Coefficients::non_negative() const {
  auto nn = [](double v) { return v >= 0.0; };
  return std::all_of(alpha.begin(), alpha.end(), nn) &&
         std::all_of(alpha_cost.begin(), alpha_cost.end(), nn) && nn(beta) && nn(beta_cost) &&
         nn(gamma);
}

const ChannelRoute& Embedding::route_of(const std::string& channel) const {
  for (const auto& r : channel_routes) {
    if (r.channel == channel) return r;
  }
  throw std::out_of_range("channel '" + channel + "' is not part of this embedding");
}

const char* to_string(EmbedFailure::Reason reason) {
  switch (reason) {
    case EmbedFailure::Reason::no_suitable_node: return "no_suitable_node";
    case EmbedFailure::Reason::no_feasible_path: return "no_feasible_path";
  }
  return "unknown";
}

double pair_quality_revenue(const Channel& channel, const VirtualRequest& request,
                            const Coefficients& coeffs) {
  const auto& src = request.service(channel.src);
  const auto& dst = request.service(channel.dst);
  return coeffs.weigh(src.demand) + coeffs.weigh(dst.demand) + coeffs.beta * channel.bw +
         coeffs.gamma * channel.min_pdr / channel.max_delay;
}

std::vector<std::size_t> channel_order(const VirtualRequest& request, const Coefficients& coeffs) {
  const auto channels = request.channels();
  std::vector<double> key(channels.size());
  for (std::size_t i = 0; i < channels.size(); ++i) {
    key[i] = pair_quality_revenue(channels[i], request, coeffs);
  }
  std::vector<std::size_t> order(channels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
  return order;
}

std::optional<NodeIndex> select_max_pdr(const SubstrateNetwork& net, const NanoService& service) {
  std::optional<NodeIndex> best;
  double best_pdr = -1.0;
  for (NodeIndex n : suitable_nodes(net, service)) {
    const double pdr = local_pdr(net, n);
    if (pdr > best_pdr) {
      best = n;
      best_pdr = pdr;
    }
  }
  return best;
}

namespace {

// Counts the links of a node's route closure, giving up once the count
// passes `limit`. Every DAG link sits in exactly one forwarding set, so the
// count is the sum of forwarding-set sizes over the reachable transmitters.
class ClosureCounter {
 public:
  explicit ClosureCounter(const AnypathRouteTable& table)
      : table_(table), stamp_(table.cost.size(), 0) {}

  std::size_t count(NodeIndex src, std::size_t limit) {
    ++epoch_;
    frontier_.assign(1, src);
    stamp_[src] = epoch_;
    std::size_t links = 0;
    for (std::size_t i = 0; i < frontier_.size(); ++i) {
      const auto& forwarders = table_.forwarding[frontier_[i]].forwarders;
      links += forwarders.size();
      if (links > limit) return links;
      for (const auto& f : forwarders) {
        if (stamp_[f.receiver] != epoch_) {
          stamp_[f.receiver] = epoch_;
          frontier_.push_back(f.receiver);
        }
      }
    }
    return links;
  }

 private:
  const AnypathRouteTable& table_;
  std::vector<std::size_t> stamp_;
  std::vector<NodeIndex> frontier_;
  std::size_t epoch_ = 0;
};

}  // namespace

NodeIndex select_min_links(const AnypathRouteTable& table, std::span<const NodeIndex> candidates) {
  if (candidates.empty()) throw std::invalid_argument("select_min_links needs candidates");
  for (NodeIndex n : candidates) {
    if (!table.reachable(n)) {
      throw UnreachableSource("node #" + std::to_string(n) + " has no anypath route to the destination");
    }
  }
  // Cheap candidates first: their closures tend to be small, which tightens
  // the cut-off for the rest.
  std::vector<NodeIndex> order(candidates.begin(), candidates.end());
  std::sort(order.begin(), order.end(), [&](NodeIndex a, NodeIndex b) {
    return table.cost[a] < table.cost[b] || (table.cost[a] == table.cost[b] && a < b);
  });
  ClosureCounter counter(table);
  NodeIndex best = order.front();
  std::size_t best_links = counter.count(best, std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 1; i < order.size(); ++i) {
    const NodeIndex n = order[i];
    // Later entries never win ties on cost or index, so only strictly fewer links count.
    if (best_links == 0) break;
    const std::size_t links = counter.count(n, best_links - 1);
    if (links < best_links) {
      best = n;
      best_links = links;
    }
  }
  return best;
}

namespace {

class EmbedAborted {
 public:
  explicit EmbedAborted(EmbedFailure f) : failure(std::move(f)) {}
  EmbedFailure failure;
};

NodeIndex place_by_max_pdr(SubstrateNetwork& net, const NanoService& service, Embedding& out) {
  const auto node = select_max_pdr(net, service);
  if (!node) {
    throw EmbedAborted({EmbedFailure::Reason::no_suitable_node, service.id,
                        "no substrate node can host service '" + service.id + "'"});
  }
  reserve_service(net, *node, service, out.ledger);
  out.service_nodes.emplace(service.id, *node);
  return *node;
}

void embed_channel(SubstrateNetwork& net, const VirtualRequest& request, const Channel& c,
                   Embedding& out) {
  const auto src_it = out.service_nodes.find(c.src);
  const auto dst_it = out.service_nodes.find(c.dst);
  const bool src_placed = src_it != out.service_nodes.end();
  const bool dst_placed = dst_it != out.service_nodes.end();

  // Anchor is where the anypath tree is rooted; `pending` is the service that
  // the selected candidate will host, if any.
  NodeIndex anchor = 0;
  const NanoService* pending = nullptr;
  std::vector<NodeIndex> candidates;
  bool reversed = false;

  if (!src_placed && !dst_placed) {
    anchor = place_by_max_pdr(net, request.service(c.dst), out);
    pending = &request.service(c.src);
    candidates = suitable_nodes(net, *pending);
  } else if (!src_placed) {
    anchor = dst_it->second;
    pending = &request.service(c.src);
    candidates = suitable_nodes(net, *pending);
  } else if (!dst_placed) {
    anchor = src_it->second;
    pending = &request.service(c.dst);
    candidates = suitable_nodes(net, *pending);
    reversed = true;
  } else {
    anchor = dst_it->second;
    candidates = {src_it->second};
  }

  if (candidates.empty()) {
    throw EmbedAborted({EmbedFailure::Reason::no_suitable_node, pending->id,
                        "no substrate node can host service '" + pending->id + "'"});
  }

  const auto view = bandwidth_subgraph(net, c.bw);
  const auto table = anypath_routes(prune(view, anchor));

  const double bound = c.max_cost();
  std::erase_if(candidates, [&](NodeIndex n) { return !(table.cost[n] <= bound); });
  if (candidates.empty()) {
    throw EmbedAborted({EmbedFailure::Reason::no_feasible_path, c.id,
                        "no candidate node reaches the anchor within the cost bound of channel '" +
                            c.id + "'"});
  }
  const NodeIndex chosen = select_min_links(table, candidates);

  if (pending != nullptr) {
    reserve_service(net, chosen, *pending, out.ledger);
    out.service_nodes.emplace(pending->id, chosen);
  }

  ChannelRoute route;
  route.channel = c.id;
  route.src_node = reversed ? anchor : chosen;
  route.dst_node = reversed ? chosen : anchor;
  route.eatt = table.cost[chosen];
  route.max_cost = bound;
  route.reversed = reversed;
  route.route = route_closure(table, chosen);
  reserve_channel(net, route.route.links, c.bw, out.ledger);
  out.channel_routes.push_back(std::move(route));
}

}  // namespace

EmbedResult embed(SubstrateNetwork& net, const VirtualRequest& request, const Coefficients& coeffs) {
  Embedding out;
  try {
    for (std::size_t i : channel_order(request, coeffs)) {
      embed_channel(net, request, request.channels()[i], out);
    }
    for (const auto& s : request.services()) {
      if (!out.service_nodes.contains(s.id)) place_by_max_pdr(net, s, out);
    }
  } catch (EmbedAborted& aborted) {
    rollback(net, out.ledger);
    return std::move(aborted.failure);
  } catch (...) {
    rollback(net, out.ledger);
    throw;
  }
  return out;
}

}  // namespace qrpad
