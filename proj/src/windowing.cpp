#include "qrpad/windowing.hpp"

#include <algorithm>
#include <numeric>

#include "qrpad/metrics.hpp"

namespace qrpad {

std::size_t WindowOutcome::accepted_count() const {
  return static_cast<std::size_t>(std::count_if(status.begin(), status.end(),
                                                [](const EmbedResult& r) { return accepted(r); }));
}

double request_quality_revenue(const VirtualRequest& request, const Coefficients& coeffs) {
  double quality = 0.0;
  for (const auto& c : request.channels()) quality += c.min_pdr / c.max_delay;
  return revenue(request, coeffs) + coeffs.gamma * quality;
}

std::vector<std::size_t> window_order(std::span<const VirtualRequest> requests,
                                      const Coefficients& coeffs) {
  std::vector<double> key(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    key[i] = request_quality_revenue(requests[i], coeffs);
  }
  std::vector<std::size_t> order(requests.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
  return order;
}

WindowOutcome process_window(SubstrateNetwork& net, std::span<const VirtualRequest> requests,
                             const Coefficients& coeffs) {
  WindowOutcome outcome;
  outcome.order = window_order(requests, coeffs);
  outcome.status.resize(requests.size(), EmbedFailure{});
  for (std::size_t i : outcome.order) outcome.status[i] = embed(net, requests[i], coeffs);
  return outcome;
}

}  // namespace qrpad
