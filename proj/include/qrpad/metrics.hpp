#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qrpad/embedder.hpp"
#include "qrpad/windowing.hpp"

namespace qrpad {

class MetricsError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Theoretical price of everything the request asks for.
double revenue(const VirtualRequest& request, const Coefficients& coeffs);

/// Substrate resources actually consumed: node demand plus, per channel,
/// bandwidth times the number of distinct links in its anypath route.
double cost(const VirtualRequest& request, const Embedding& embedding, const Coefficients& coeffs);

struct Ratios {
  double acceptance;
  double blocking;
};

/// Throws MetricsError on an empty window.
Ratios ratios(const WindowOutcome& outcome);

double embedding_revenue(std::span<const VirtualRequest> requests, const WindowOutcome& outcome,
                         const Coefficients& coeffs);
double embedding_cost(std::span<const VirtualRequest> requests, const WindowOutcome& outcome,
                      const Coefficients& coeffs);

/// Throws MetricsError when the embedding cost is zero.
double revenue_cost_ratio(std::span<const VirtualRequest> requests, const WindowOutcome& outcome,
                          const Coefficients& coeffs);

struct NodeUsage {
  std::string node;
  int services = 0;
  Resources used;
  Resources total;
};

struct LinkUsage {
  std::string link;
  int channels = 0;
  int bw_used = 0;
  int bw_total = 0;
};

struct UsageReport {
  std::vector<NodeUsage> nodes;
  std::vector<LinkUsage> links;
};

/// Per-node and per-link utilisation between two snapshots of one topology.
/// Throws MetricsError when the snapshots disagree on nodes or links.
UsageReport usage_report(const SubstrateNetwork& before, const SubstrateNetwork& after,
                         const WindowOutcome& outcome);

struct MetricsReport {
  double acceptance_ratio = 0.0;
  double blocking_ratio = 0.0;
  double revenue = 0.0;
  double cost = 0.0;
  double rc_ratio = 0.0;  // NaN when nothing was accepted
  UsageReport usage;
};

MetricsReport evaluate_window(const SubstrateNetwork& before, const SubstrateNetwork& after,
                              std::span<const VirtualRequest> requests, const WindowOutcome& outcome,
                              const Coefficients& coeffs);

}  // namespace qrpad
