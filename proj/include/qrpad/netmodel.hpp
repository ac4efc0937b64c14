#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace qrpad {

using NodeIndex = std::size_t;
using LinkIndex = std::size_t;

/// Non-functional node resources, in integer capacity units.
struct Resources {
  int cpu = 0;
  int gpu = 0;
  int mem = 0;

  Resources& operator+=(const Resources& o) {
    cpu += o.cpu;
    gpu += o.gpu;
    mem += o.mem;
    return *this;
  }
  Resources& operator-=(const Resources& o) {
    cpu -= o.cpu;
    gpu -= o.gpu;
    mem -= o.mem;
    return *this;
  }
  friend Resources operator+(Resources a, const Resources& b) { return a += b; }
  friend Resources operator-(Resources a, const Resources& b) { return a -= b; }
  friend bool operator==(const Resources&, const Resources&) = default;

  /// Component-wise a <= b.
  bool fits_in(const Resources& capacity) const {
    return cpu <= capacity.cpu && gpu <= capacity.gpu && mem <= capacity.mem;
  }
  bool non_negative() const { return cpu >= 0 && gpu >= 0 && mem >= 0; }
  int total() const { return cpu + gpu + mem; }
};

using Capabilities = std::set<std::string>;

struct SubstrateNode {
  std::string id;
  Resources available;
  Resources original;
  Capabilities functionals;

  friend bool operator==(const SubstrateNode&, const SubstrateNode&) = default;
};

/// Undirected lossy link. Delay and delivery ratio are the same both ways.
struct SubstrateLink {
  std::string id;
  NodeIndex a = 0;
  NodeIndex b = 0;
  int bw = 0;
  int bw0 = 0;
  double delay = 1.0;
  double pdr = 1.0;

  NodeIndex other(NodeIndex n) const { return n == a ? b : a; }
  bool touches(NodeIndex n) const { return n == a || n == b; }

  friend bool operator==(const SubstrateLink&, const SubstrateLink&) = default;
};

// Plain records as read from a file; may violate every invariant.
struct NodeRecord {
  std::string id;
  Resources capacity;
  Capabilities functionals;
};

struct LinkRecord {
  std::string id;
  std::string a;
  std::string b;
  int bw = 0;
  double delay = 1.0;
  double pdr = 1.0;
};

struct SubstrateDescription {
  std::vector<NodeRecord> nodes;
  std::vector<LinkRecord> links;
};

struct Violation {
  enum class Kind {
    negative_capacity,
    pdr_out_of_range,
    non_positive_delay,
    duplicate_id,
    duplicate_link,
    dangling_endpoint,
    self_loop,
  };
  Kind kind;
  std::string subject;  // offending node or link id
  std::string message;
};

using ValidationReport = std::vector<Violation>;

const char* to_string(Violation::Kind kind);

/// Lists every invariant violation in `desc`; empty when the description is valid.
ValidationReport validate_substrate(const SubstrateDescription& desc);

class InvalidSubstrate : public std::runtime_error {
 public:
  explicit InvalidSubstrate(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

class InsufficientCapacity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The physical resource pool. Nodes and links are addressed by dense
/// indices in insertion order; string ids are kept for I/O.
class SubstrateNetwork {
 public:
  SubstrateNetwork() = default;

  /// Throws InvalidSubstrate when validate_substrate reports anything.
  static SubstrateNetwork from_description(const SubstrateDescription& desc);
  SubstrateDescription describe() const;

  NodeIndex add_node(std::string id, Resources capacity, Capabilities functionals = {});
  LinkIndex add_link(std::string id, NodeIndex a, NodeIndex b, int bw, double delay, double pdr);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t link_count() const { return links_.size(); }
  const SubstrateNode& node(NodeIndex n) const { return nodes_.at(n); }
  const SubstrateLink& link(LinkIndex l) const { return links_.at(l); }
  std::span<const SubstrateNode> nodes() const { return nodes_; }
  std::span<const SubstrateLink> links() const { return links_; }
  std::span<const LinkIndex> incident(NodeIndex n) const { return adjacency_.at(n); }

  NodeIndex node_index(const std::string& id) const;
  LinkIndex link_index(const std::string& id) const;
  bool has_node(const std::string& id) const { return node_by_id_.contains(id); }

  // Raw capacity mutation. Throws InsufficientCapacity when the result would
  // leave [0, original].
  void take(NodeIndex n, const Resources& amount);
  void give_back(NodeIndex n, const Resources& amount);
  void take_bandwidth(LinkIndex l, int amount);
  void give_back_bandwidth(LinkIndex l, int amount);

  friend bool operator==(const SubstrateNetwork& x, const SubstrateNetwork& y) {
    return x.nodes_ == y.nodes_ && x.links_ == y.links_;
  }

 private:
  std::vector<SubstrateNode> nodes_;
  std::vector<SubstrateLink> links_;
  std::vector<std::vector<LinkIndex>> adjacency_;
  std::unordered_map<std::string, NodeIndex> node_by_id_;
  std::unordered_map<std::string, LinkIndex> link_by_id_;
};

struct NanoService {
  std::string id;
  Resources demand;
  Capabilities functionals;
};

struct Channel {
  std::string id;
  std::string src;
  std::string dst;
  int bw = 1;
  double max_delay = 1.0;
  double min_pdr = 1.0;

  /// Maximum tolerated route cost, always derived from delay and reliability.
  double max_cost() const { return max_delay / min_pdr; }
};

class InvalidRequest : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dataflow application graph: services plus directed channels in arrival order.
class VirtualRequest {
 public:
  VirtualRequest() = default;
  explicit VirtualRequest(std::string id) : id_(std::move(id)) {}

  const std::string& id() const { return id_; }
  void set_id(std::string id) { id_ = std::move(id); }

  void add_service(NanoService s);
  /// Endpoints must already exist and differ.
  void add_channel(Channel c);

  std::span<const NanoService> services() const { return services_; }
  std::span<const Channel> channels() const { return channels_; }
  const NanoService& service(const std::string& id) const;
  bool has_service(const std::string& id) const { return service_by_id_.contains(id); }

 private:
  std::string id_;
  std::vector<NanoService> services_;
  std::vector<Channel> channels_;
  std::unordered_map<std::string, std::size_t> service_by_id_;
};

// Reservation journal. Replaying in reverse restores the substrate exactly.
struct NodeReservation {
  NodeIndex node;
  Resources amount;
};
struct LinkReservation {
  LinkIndex link;
  int amount;
};
using Reservation = std::variant<NodeReservation, LinkReservation>;

struct ReservationLedger {
  std::vector<Reservation> entries;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
};

/// d / rho: expected transmission time over a single link.
inline double link_cost(const SubstrateLink& link) { return link.delay / link.pdr; }

/// Mean delivery ratio over the node's incident links, 0 when isolated.
double local_pdr(const SubstrateNetwork& net, NodeIndex node);

/// Nodes whose available resources and capabilities cover the service.
std::vector<NodeIndex> suitable_nodes(const SubstrateNetwork& net, const NanoService& service);
bool is_suitable(const SubstrateNode& node, const NanoService& service);

void reserve_service(SubstrateNetwork& net, NodeIndex node, const NanoService& service,
                     ReservationLedger& ledger);
/// Debits `bw` from every listed link. All links are checked before any is touched.
void reserve_channel(SubstrateNetwork& net, std::span<const LinkIndex> route_links, int bw,
                     ReservationLedger& ledger);
void rollback(SubstrateNetwork& net, ReservationLedger& ledger);

}  // namespace qrpad
