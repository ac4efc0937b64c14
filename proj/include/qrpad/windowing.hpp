#pragma once

#include <span>
#include <vector>

#include "qrpad/embedder.hpp"

namespace qrpad {

/// Result of processing one time window. `status[i]` belongs to `requests[i]`
/// of the input; `order` lists input positions in processing order.
struct WindowOutcome {
  std::vector<std::size_t> order;
  std::vector<EmbedResult> status;

  std::size_t total() const { return status.size(); }
  std::size_t accepted_count() const;
  std::size_t blocked_count() const { return total() - accepted_count(); }
};

/// Request revenue plus gamma times the sum of rho/d over its channels.
double request_quality_revenue(const VirtualRequest& request, const Coefficients& coeffs);

/// Request positions sorted by descending quality-revenue; ties keep arrival order.
std::vector<std::size_t> window_order(std::span<const VirtualRequest> requests,
                                      const Coefficients& coeffs);

/// Embeds every request of the window in quality-revenue order against `net`.
/// Blocked requests leave no trace on the substrate.
WindowOutcome process_window(SubstrateNetwork& net, std::span<const VirtualRequest> requests,
                             const Coefficients& coeffs);

}  // namespace qrpad
