#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "qrpad/metrics.hpp"
#include "qrpad/scenario.hpp"
#include "qrpad/windowing.hpp"
#include "test_support.hpp"

namespace qrpad {
namespace {

TEST(RequestQualityRevenue, Example) {
  const auto fx = example_fixture();
  const double expected = 310.0 + 500.0 * (0.6 / 20 + 0.8 / 50 + 0.8 / 30);
  EXPECT_NEAR(request_quality_revenue(fx.request, fx.coeffs), expected, 1e-12);
  EXPECT_NEAR(request_quality_revenue(fx.request, fx.coeffs), 346.333333, 1e-6);
}

TEST(RequestQualityRevenue, NoChannelsIsRevenue) {
  VirtualRequest r;
  r.add_service({"a", {3, 4, 5}, {}});
  Coefficients k;
  k.gamma = 1000;
  EXPECT_DOUBLE_EQ(request_quality_revenue(r, k), 12.0);
  k.gamma = 0;
  EXPECT_DOUBLE_EQ(request_quality_revenue(r, k), 12.0);
}

TEST(ProcessWindow, SingleExampleAccepted) {
  auto fx = example_fixture();
  const std::vector<VirtualRequest> window{fx.request};
  const auto out = process_window(fx.substrate, window, fx.coeffs);
  EXPECT_EQ(out.accepted_count(), 1u);
  EXPECT_EQ(out.blocked_count(), 0u);
  EXPECT_EQ(ratios(out).acceptance, 1.0);
}

TEST(ProcessWindow, DuplicateExampleBlocksSecond) {
  auto fx = example_fixture();
  const std::vector<VirtualRequest> window{fx.request, fx.request};
  const auto out = process_window(fx.substrate, window, fx.coeffs);
  EXPECT_EQ(out.order, (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(accepted(out.status[0]));
  ASSERT_FALSE(accepted(out.status[1]));
  EXPECT_EQ(std::get<EmbedFailure>(out.status[1]).reason, EmbedFailure::Reason::no_suitable_node);
  // c1 goes first and needs a home for s2; no node has 30 GPU left.
  EXPECT_EQ(std::get<EmbedFailure>(out.status[1]).subject, "s2");
  const auto r = ratios(out);
  EXPECT_DOUBLE_EQ(r.acceptance, 0.5);
  EXPECT_DOUBLE_EQ(r.blocking, 0.5);

  // Only the first request's debits remain.
  auto single = example_fixture();
  embed(single.substrate, single.request, single.coeffs);
  EXPECT_EQ(fx.substrate, single.substrate);
}

TEST(ProcessWindow, EmptyWindow) {
  auto fx = example_fixture();
  const auto before = fx.substrate;
  const auto out = process_window(fx.substrate, {}, fx.coeffs);
  EXPECT_EQ(out.total(), 0u);
  EXPECT_EQ(fx.substrate, before);
  EXPECT_THROW(ratios(out), MetricsError);
}

TEST(WindowOrder, HigherQualityFirst) {
  VirtualRequest small("small");
  small.add_service({"a", {1, 0, 1}, {}});
  VirtualRequest big("big");
  big.add_service({"a", {9, 0, 9}, {}});
  VirtualRequest tie("tie");
  tie.add_service({"a", {1, 0, 1}, {}});
  const std::vector<VirtualRequest> w{small, big, tie};
  EXPECT_EQ(window_order(w, Coefficients{}), (std::vector<std::size_t>{1, 0, 2}));
}

TEST(WindowProperty, RandomWindows) {
  std::mt19937_64 rng(77);
  GeneratorConfig gen;
  Coefficients k = SimulationConfig::default_simulation_coefficients();
  for (int i = 0; i < 1000; ++i) {
    auto net = testing::random_substrate(rng, 3, 9, 0.5, 40, 30);
    const auto before = net;
    const int size = std::uniform_int_distribution<int>(1, 12)(rng);
    std::vector<VirtualRequest> window;
    for (int r = 0; r < size; ++r) window.push_back(testing::random_request(rng, gen, "r" + std::to_string(r)));

    std::vector<std::pair<double, std::size_t>> keyed;
    for (std::size_t r = 0; r < window.size(); ++r) keyed.emplace_back(-request_quality_revenue(window[r], k), r);
    std::sort(keyed.begin(), keyed.end());
    std::vector<std::size_t> expected;
    for (const auto& kv : keyed) expected.push_back(kv.second);

    const auto out = process_window(net, window, k);
    ASSERT_EQ(out.order, expected);
    ASSERT_EQ(out.total(), window.size());
    const auto rt = ratios(out);
    ASSERT_DOUBLE_EQ(rt.acceptance + rt.blocking, 1.0);

    // Applying the accepted ledgers in processing order reproduces the end state.
    auto replay = before;
    for (auto pos : out.order) {
      const auto* e = std::get_if<Embedding>(&out.status[pos]);
      if (!e) continue;
      for (const auto& entry : e->ledger.entries) {
        if (const auto* lr = std::get_if<LinkReservation>(&entry)) {
          replay.take_bandwidth(lr->link, lr->amount);
        } else {
          const auto& nr = std::get<NodeReservation>(entry);
          replay.take(nr.node, nr.amount);
        }
      }
    }
    ASSERT_EQ(replay, net);
  }
}

}  // namespace
}  // namespace qrpad
