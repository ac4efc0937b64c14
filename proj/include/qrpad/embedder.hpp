#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qrpad/anypath.hpp"
#include "qrpad/netmodel.hpp"

namespace qrpad {

/// Revenue and cost weights. Index order of the resource arrays is cpu, gpu, mem.
struct Coefficients {
  std::array<double, 3> alpha{1.0, 1.0, 1.0};
  double beta = 1.0;
  std::array<double, 3> alpha_cost{1.0, 1.0, 1.0};
  double beta_cost = 1.0;
  double gamma = 0.0;

  double weigh(const Resources& r) const {
    return alpha[0] * r.cpu + alpha[1] * r.gpu + alpha[2] * r.mem;
  }
  double weigh_cost(const Resources& r) const {
    return alpha_cost[0] * r.cpu + alpha_cost[1] * r.gpu + alpha_cost[2] * r.mem;
  }
  bool non_negative() const;
};

/// Where one channel landed.
struct ChannelRoute {
  std::string channel;
  NodeIndex src_node = 0;
  NodeIndex dst_node = 0;
  double eatt = 0.0;        // anypath cost of the realized route
  double max_cost = 0.0;    // the channel's tolerated cost bound
  bool reversed = false;    // computed toward the source service's node, then transposed
  RouteClosure route;       // empty when both endpoints share a node
};

struct Embedding {
  std::map<std::string, NodeIndex> service_nodes;
  std::vector<ChannelRoute> channel_routes;  // in processing order
  ReservationLedger ledger;

  const ChannelRoute& route_of(const std::string& channel) const;
};

struct EmbedFailure {
  enum class Reason { no_suitable_node, no_feasible_path };
  Reason reason;
  std::string subject;  // service or channel id
  std::string message;
};

const char* to_string(EmbedFailure::Reason reason);

using EmbedResult = std::variant<Embedding, EmbedFailure>;

inline bool accepted(const EmbedResult& r) { return std::holds_alternative<Embedding>(r); }

/// Revenue of the two endpoint services and the channel, plus the weighted
/// reliability-over-delay term.
double pair_quality_revenue(const Channel& channel, const VirtualRequest& request,
                            const Coefficients& coeffs);

/// Channel indices sorted by descending pair quality-revenue; ties keep request order.
std::vector<std::size_t> channel_order(const VirtualRequest& request, const Coefficients& coeffs);

/// Suitable node with the highest local delivery ratio; ties go to the lower index.
std::optional<NodeIndex> select_max_pdr(const SubstrateNetwork& net, const NanoService& service);

/// Candidate whose route uses the fewest links, then lower cost, then lower index.
/// Every candidate must be reachable in `table`.
NodeIndex select_min_links(const AnypathRouteTable& table, std::span<const NodeIndex> candidates);

/// Embeds the whole request or nothing. On failure `net` is left exactly as
/// it was on entry.
EmbedResult embed(SubstrateNetwork& net, const VirtualRequest& request, const Coefficients& coeffs);

}  // namespace qrpad
