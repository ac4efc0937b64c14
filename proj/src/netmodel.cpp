#include "qrpad/netmodel.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace qrpad {

const char* to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::negative_capacity: return "negative_capacity";
    case Violation::Kind::pdr_out_of_range: return "pdr_out_of_range";
    case Violation::Kind::non_positive_delay: return "non_positive_delay";
    case Violation::Kind::duplicate_id: return "duplicate_id";
    case Violation::Kind::duplicate_link: return "duplicate_link";
    case Violation::Kind::dangling_endpoint: return "dangling_endpoint";
    case Violation::Kind::self_loop: return "self_loop";
  }
  return "unknown";
}

ValidationReport validate_substrate(const SubstrateDescription& desc) {
  ValidationReport report;
  auto add = [&](Violation::Kind kind, const std::string& subject, std::string message) {
    report.push_back({kind, subject, std::move(message)});
  };

  std::set<std::string> node_ids;
  for (const auto& n : desc.nodes) {
    if (!node_ids.insert(n.id).second) {
      add(Violation::Kind::duplicate_id, n.id, "node id '" + n.id + "' appears more than once");
    }
    if (!n.capacity.non_negative()) {
      add(Violation::Kind::negative_capacity, n.id, "node '" + n.id + "' has a negative capacity");
    }
  }

  std::set<std::string> link_ids;
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& l : desc.links) {
    if (!link_ids.insert(l.id).second) {
      add(Violation::Kind::duplicate_id, l.id, "link id '" + l.id + "' appears more than once");
    }
    if (l.bw < 0) {
      add(Violation::Kind::negative_capacity, l.id, "link '" + l.id + "' has negative bandwidth");
    }
    if (!(l.pdr > 0.0 && l.pdr <= 1.0)) {
      std::ostringstream msg;
      msg << "link '" << l.id << "' has pdr " << l.pdr << " outside (0, 1]";
      add(Violation::Kind::pdr_out_of_range, l.id, msg.str());
    }
    if (!(l.delay > 0.0)) {
      add(Violation::Kind::non_positive_delay, l.id, "link '" + l.id + "' has non-positive delay");
    }
    bool dangling = false;
    for (const auto* end : {&l.a, &l.b}) {
      if (!node_ids.contains(*end)) {
        dangling = true;
        add(Violation::Kind::dangling_endpoint, l.id,
            "link '" + l.id + "' references unknown node '" + *end + "'");
      }
    }
    if (l.a == l.b) {
      add(Violation::Kind::self_loop, l.id, "link '" + l.id + "' is a self-loop");
    } else if (!dangling) {
      auto key = std::minmax(l.a, l.b);
      if (!pairs.insert({key.first, key.second}).second) {
        add(Violation::Kind::duplicate_link, l.id,
            "link '" + l.id + "' duplicates the pair (" + l.a + ", " + l.b + ")");
      }
    }
  }
  return report;
}

namespace {

std::string summarize(const ValidationReport& report) {
  std::string out = "invalid substrate";
  for (const auto& v : report) out += "; " + v.message;
  return out;
}

}  // namespace

InvalidSubstrate::InvalidSubstrate(ValidationReport report)
    : std::runtime_error(summarize(report)), report_(std::move(report)) {}

SubstrateNetwork SubstrateNetwork::from_description(const SubstrateDescription& desc) {
  if (auto report = validate_substrate(desc); !report.empty()) {
    throw InvalidSubstrate(std::move(report));
  }
  SubstrateNetwork net;
  for (const auto& n : desc.nodes) net.add_node(n.id, n.capacity, n.functionals);
  for (const auto& l : desc.links) {
    net.add_link(l.id, net.node_index(l.a), net.node_index(l.b), l.bw, l.delay, l.pdr);
  }
  return net;
}

SubstrateDescription SubstrateNetwork::describe() const {
  SubstrateDescription desc;
  for (const auto& n : nodes_) desc.nodes.push_back({n.id, n.available, n.functionals});
  for (const auto& l : links_) {
    desc.links.push_back({l.id, nodes_[l.a].id, nodes_[l.b].id, l.bw, l.delay, l.pdr});
  }
  return desc;
}

NodeIndex SubstrateNetwork::add_node(std::string id, Resources capacity, Capabilities functionals) {
  if (!capacity.non_negative()) throw InvalidSubstrate({{Violation::Kind::negative_capacity, id,
                                                         "node '" + id + "' has a negative capacity"}});
  if (node_by_id_.contains(id)) {
    throw InvalidSubstrate({{Violation::Kind::duplicate_id, id, "duplicate node id '" + id + "'"}});
  }
  const NodeIndex index = nodes_.size();
  node_by_id_.emplace(id, index);
  nodes_.push_back({std::move(id), capacity, capacity, std::move(functionals)});
  adjacency_.emplace_back();
  return index;
}

LinkIndex SubstrateNetwork::add_link(std::string id, NodeIndex a, NodeIndex b, int bw, double delay,
                                     double pdr) {
  ValidationReport report;
  if (a >= nodes_.size() || b >= nodes_.size()) {
    report.push_back({Violation::Kind::dangling_endpoint, id, "link '" + id + "' has an unknown endpoint"});
  } else if (a == b) {
    report.push_back({Violation::Kind::self_loop, id, "link '" + id + "' is a self-loop"});
  } else {
    for (LinkIndex other : adjacency_[a]) {
      if (links_[other].touches(b)) {
        report.push_back({Violation::Kind::duplicate_link, id,
                          "link '" + id + "' duplicates link '" + links_[other].id + "'"});
      }
    }
  }
  if (link_by_id_.contains(id)) {
    report.push_back({Violation::Kind::duplicate_id, id, "duplicate link id '" + id + "'"});
  }
  if (bw < 0) report.push_back({Violation::Kind::negative_capacity, id, "negative bandwidth"});
  if (!(pdr > 0.0 && pdr <= 1.0)) {
    report.push_back({Violation::Kind::pdr_out_of_range, id, "pdr outside (0, 1]"});
  }
  if (!(delay > 0.0)) report.push_back({Violation::Kind::non_positive_delay, id, "non-positive delay"});
  if (!report.empty()) throw InvalidSubstrate(std::move(report));

  const LinkIndex index = links_.size();
  link_by_id_.emplace(id, index);
  links_.push_back({std::move(id), a, b, bw, bw, delay, pdr});
  adjacency_[a].push_back(index);
  adjacency_[b].push_back(index);
  return index;
}

NodeIndex SubstrateNetwork::node_index(const std::string& id) const {
  auto it = node_by_id_.find(id);
  if (it == node_by_id_.end()) throw std::out_of_range("unknown node '" + id + "'");
  return it->second;
}

LinkIndex SubstrateNetwork::link_index(const std::string& id) const {
  auto it = link_by_id_.find(id);
  if (it == link_by_id_.end()) throw std::out_of_range("unknown link '" + id + "'");
  return it->second;
}

void SubstrateNetwork::take(NodeIndex n, const Resources& amount) {
  auto& node = nodes_.at(n);
  if (!amount.non_negative() || !amount.fits_in(node.available)) {
    throw InsufficientCapacity("node '" + node.id + "' cannot supply the requested resources");
  }
  node.available -= amount;
}

void SubstrateNetwork::give_back(NodeIndex n, const Resources& amount) {
  auto& node = nodes_.at(n);
  const Resources restored = node.available + amount;
  if (!amount.non_negative() || !restored.fits_in(node.original)) {
    throw InsufficientCapacity("node '" + node.id + "' would exceed its original capacity");
  }
  node.available = restored;
}

void SubstrateNetwork::take_bandwidth(LinkIndex l, int amount) {
  auto& link = links_.at(l);
  if (amount < 0 || amount > link.bw) {
    throw InsufficientCapacity("link '" + link.id + "' cannot supply bandwidth " +
                               std::to_string(amount));
  }
  link.bw -= amount;
}

void SubstrateNetwork::give_back_bandwidth(LinkIndex l, int amount) {
  auto& link = links_.at(l);
  if (amount < 0 || link.bw + amount > link.bw0) {
    throw InsufficientCapacity("link '" + link.id + "' would exceed its original bandwidth");
  }
  link.bw += amount;
}

void VirtualRequest::add_service(NanoService s) {
  if (service_by_id_.contains(s.id)) throw InvalidRequest("duplicate service id '" + s.id + "'");
  if (!s.demand.non_negative()) throw InvalidRequest("service '" + s.id + "' has a negative demand");
  service_by_id_.emplace(s.id, services_.size());
  services_.push_back(std::move(s));
}

void VirtualRequest::add_channel(Channel c) {
  if (!has_service(c.src)) throw InvalidRequest("channel '" + c.id + "' has unknown src '" + c.src + "'");
  if (!has_service(c.dst)) throw InvalidRequest("channel '" + c.id + "' has unknown dst '" + c.dst + "'");
  if (c.src == c.dst) throw InvalidRequest("channel '" + c.id + "' connects a service to itself");
  if (c.bw <= 0) throw InvalidRequest("channel '" + c.id + "' must demand positive bandwidth");
  if (!(c.max_delay > 0.0)) throw InvalidRequest("channel '" + c.id + "' must have positive max_delay");
  if (!(c.min_pdr > 0.0 && c.min_pdr <= 1.0)) {
    throw InvalidRequest("channel '" + c.id + "' min_pdr outside (0, 1]");
  }
  channels_.push_back(std::move(c));
}

const NanoService& VirtualRequest::service(const std::string& id) const {
  auto it = service_by_id_.find(id);
  if (it == service_by_id_.end()) throw std::out_of_range("unknown service '" + id + "'");
  return services_[it->second];
}

double local_pdr(const SubstrateNetwork& net, NodeIndex node) {
  const auto incident = net.incident(node);
  if (incident.empty()) return 0.0;
  double sum = 0.0;
  for (LinkIndex l : incident) sum += net.link(l).pdr;
  return sum / static_cast<double>(incident.size());
}

bool is_suitable(const SubstrateNode& node, const NanoService& service) {
  if (!service.demand.fits_in(node.available)) return false;
  return std::includes(node.functionals.begin(), node.functionals.end(),
                       service.functionals.begin(), service.functionals.end());
}

std::vector<NodeIndex> suitable_nodes(const SubstrateNetwork& net, const NanoService& service) {
  std::vector<NodeIndex> out;
  for (NodeIndex n = 0; n < net.node_count(); ++n) {
    if (is_suitable(net.node(n), service)) out.push_back(n);
  }
  return out;
}

void reserve_service(SubstrateNetwork& net, NodeIndex node, const NanoService& service,
                     ReservationLedger& ledger) {
  net.take(node, service.demand);
  ledger.entries.emplace_back(NodeReservation{node, service.demand});
}

void reserve_channel(SubstrateNetwork& net, std::span<const LinkIndex> route_links, int bw,
                     ReservationLedger& ledger) {
  for (LinkIndex l : route_links) {
    if (net.link(l).bw < bw) {
      throw InsufficientCapacity("link '" + net.link(l).id + "' has bandwidth " +
                                 std::to_string(net.link(l).bw) + " < " + std::to_string(bw));
    }
  }
  for (LinkIndex l : route_links) {
    net.take_bandwidth(l, bw);
    ledger.entries.emplace_back(LinkReservation{l, bw});
  }
}

void rollback(SubstrateNetwork& net, ReservationLedger& ledger) {
  for (auto it = ledger.entries.rbegin(); it != ledger.entries.rend(); ++it) {
    std::visit(
        [&](const auto& r) {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, NodeReservation>) {
            net.give_back(r.node, r.amount);
          } else {
            net.give_back_bandwidth(r.link, r.amount);
          }
        },
        *it);
  }
  ledger.entries.clear();
}

}  // namespace qrpad
