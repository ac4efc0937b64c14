#include "qrpad/metrics.hpp"

#include <cmath>
#include <limits>

namespace qrpad {

double revenue(const VirtualRequest& request, const Coefficients& coeffs) {
  double total = 0.0;
  for (const auto& s : request.services()) total += coeffs.weigh(s.demand);
  for (const auto& c : request.channels()) total += coeffs.beta * c.bw;
  return total;
}

double cost(const VirtualRequest& request, const Embedding& embedding, const Coefficients& coeffs) {
  double total = 0.0;
  for (const auto& s : request.services()) total += coeffs.weigh_cost(s.demand);
  for (const auto& c : request.channels()) {
    const auto& route = embedding.route_of(c.id);
    total += coeffs.beta_cost * c.bw * static_cast<double>(route.route.links.size());
  }
  return total;
}

Ratios ratios(const WindowOutcome& outcome) {
  if (outcome.total() == 0) throw MetricsError("acceptance ratio of an empty window");
  const double acceptance =
      static_cast<double>(outcome.accepted_count()) / static_cast<double>(outcome.total());
  return {acceptance, 1.0 - acceptance};
}

double embedding_revenue(std::span<const VirtualRequest> requests, const WindowOutcome& outcome,
                         const Coefficients& coeffs) {
  double total = 0.0;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (accepted(outcome.status.at(i))) total += revenue(requests[i], coeffs);
  }
  return total;
}

double embedding_cost(std::span<const VirtualRequest> requests, const WindowOutcome& outcome,
                      const Coefficients& coeffs) {
  double total = 0.0;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (const auto* e = std::get_if<Embedding>(&outcome.status.at(i))) {
      total += cost(requests[i], *e, coeffs);
    }
  }
  return total;
}

double revenue_cost_ratio(std::span<const VirtualRequest> requests, const WindowOutcome& outcome,
                          const Coefficients& coeffs) {
  const double c = embedding_cost(requests, outcome, coeffs);
  if (c == 0.0) throw MetricsError("revenue/cost ratio with zero embedding cost");
  return embedding_revenue(requests, outcome, coeffs) / c;
}

UsageReport usage_report(const SubstrateNetwork& before, const SubstrateNetwork& after,
                         const WindowOutcome& outcome) {
  if (before.node_count() != after.node_count() || before.link_count() != after.link_count()) {
    throw MetricsError("usage report over different topologies");
  }
  UsageReport report;
  report.nodes.reserve(before.node_count());
  for (NodeIndex n = 0; n < before.node_count(); ++n) {
    const auto& b = before.node(n);
    const auto& a = after.node(n);
    if (b.id != a.id) throw MetricsError("node '" + b.id + "' does not match '" + a.id + "'");
    report.nodes.push_back({b.id, 0, b.available - a.available, b.available});
  }
  report.links.reserve(before.link_count());
  for (LinkIndex l = 0; l < before.link_count(); ++l) {
    const auto& b = before.link(l);
    const auto& a = after.link(l);
    if (b.id != a.id || b.a != a.a || b.b != a.b) {
      throw MetricsError("link '" + b.id + "' does not match '" + a.id + "'");
    }
    report.links.push_back({b.id, 0, b.bw - a.bw, b.bw});
  }
  for (const auto& status : outcome.status) {
    const auto* e = std::get_if<Embedding>(&status);
    if (e == nullptr) continue;
    for (const auto& [service, node] : e->service_nodes) ++report.nodes.at(node).services;
    for (const auto& r : e->channel_routes) {
      for (LinkIndex l : r.route.links) ++report.links.at(l).channels;
    }
  }
  return report;
}

MetricsReport evaluate_window(const SubstrateNetwork& before, const SubstrateNetwork& after,
                              std::span<const VirtualRequest> requests, const WindowOutcome& outcome,
                              const Coefficients& coeffs) {
  MetricsReport m;
  const auto r = ratios(outcome);
  m.acceptance_ratio = r.acceptance;
  m.blocking_ratio = r.blocking;
  m.revenue = embedding_revenue(requests, outcome, coeffs);
  m.cost = embedding_cost(requests, outcome, coeffs);
  m.rc_ratio = m.cost > 0.0 ? m.revenue / m.cost : std::numeric_limits<double>::quiet_NaN();
  m.usage = usage_report(before, after, outcome);
  return m;
}

}  // namespace qrpad
