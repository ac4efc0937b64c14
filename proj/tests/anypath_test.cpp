#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "qrpad/anypath.hpp"
#include "qrpad/scenario.hpp"
#include "test_support.hpp"

namespace qrpad {
namespace {

constexpr double kLinkCost10 = 10.0 / 0.9;  // d = 10, rho = 0.9

struct Example {
  SubstrateNetwork net = example_fixture().substrate;
  NodeIndex n(const char* id) const { return net.node_index(id); }
  LinkIndex l(const char* id) const { return net.link_index(id); }

  std::vector<std::string> ids(const std::vector<LinkIndex>& links) const {
    std::vector<std::string> out;
    for (auto x : links) out.push_back(net.link(x).id);
    return out;
  }
  std::vector<std::string> receivers(const Hyperlink& h) const {
    std::vector<std::string> out;
    for (const auto& f : h.forwarders) out.push_back(net.node(f.receiver).id);
    return out;
  }
  // Link state of the walkthrough once c1 and c2 hold their bandwidth.
  void apply_first_three_steps() {
    ReservationLedger ledger;
    reserve_channel(net, std::vector<LinkIndex>{l("l1"), l("l2"), l("l3"), l("l4")}, 50, ledger);
    reserve_channel(net, std::vector<LinkIndex>{l("l2"), l("l5")}, 30, ledger);
  }
};

TEST(UnicastDistances, ExampleTowardN4) {
  Example ex;
  const auto dist = unicast_distances(SubstrateView(ex.net), ex.n("n4"));
  EXPECT_EQ(dist[ex.n("n4")], 0.0);
  EXPECT_NEAR(dist[ex.n("n2")], kLinkCost10, 1e-12);
  EXPECT_NEAR(dist[ex.n("n3")], kLinkCost10, 1e-12);
  EXPECT_NEAR(dist[ex.n("n1")], 2 * kLinkCost10, 1e-12);
  EXPECT_NEAR(dist[ex.n("n5")], 20.0 / 0.75 + kLinkCost10, 1e-12);
  EXPECT_NEAR(dist[ex.n("n5")], 37.78, 5e-3);
  EXPECT_NEAR(dist[ex.n("n1")], 22.22, 5e-3);
}

TEST(UnicastDistances, IsolatedIsUnreachable) {
  SubstrateNetwork net;
  net.add_node("a", {});
  net.add_node("b", {});
  net.add_node("c", {});
  net.add_link("l", 0, 1, 5, 1, 1);
  const auto dist = unicast_distances(SubstrateView(net), 0);
  EXPECT_EQ(dist[0], 0.0);
  EXPECT_EQ(dist[1], 1.0);
  EXPECT_FALSE(is_reachable(dist[2]));
}

TEST(BandwidthSubgraph, Examples) {
  Example ex;
  EXPECT_EQ(bandwidth_subgraph(ex.net, 1).enabled_links().size(), 6u);
  EXPECT_TRUE(bandwidth_subgraph(ex.net, 101).enabled_links().empty());
  // after c1 took 50 from l1..l4: 20, 30, 50, 20, 100, 100
  ReservationLedger ledger;
  reserve_channel(ex.net, std::vector<LinkIndex>{ex.l("l1"), ex.l("l2"), ex.l("l3"), ex.l("l4")}, 50, ledger);
  EXPECT_EQ(ex.ids(bandwidth_subgraph(ex.net, 30).enabled_links()),
            (std::vector<std::string>{"l2", "l3", "l5", "l6"}));
}

TEST(Prune, ExampleTowardN4) {
  Example ex;
  const auto dag = prune(SubstrateView(ex.net), ex.n("n4"));
  std::set<std::pair<std::string, std::string>> edges;
  for (const auto& e : dag.edges) edges.emplace(ex.net.node(e.from).id, ex.net.node(e.to).id);
  const std::set<std::pair<std::string, std::string>> expected{
      {"n1", "n2"}, {"n1", "n3"}, {"n2", "n4"}, {"n3", "n4"}, {"n5", "n3"}, {"n5", "n4"}};
  EXPECT_EQ(edges, expected);
  EXPECT_TRUE(is_acyclic(dag));
}

TEST(Prune, EqualDistanceLinkIsDropped) {
  // a and b are both one hop of identical cost from d, and joined to each other.
  SubstrateNetwork net;
  net.add_node("d", {});
  net.add_node("a", {});
  net.add_node("b", {});
  net.add_link("da", 0, 1, 5, 2, 0.5);
  net.add_link("db", 0, 2, 5, 2, 0.5);
  net.add_link("ab", 1, 2, 5, 1, 1.0);
  const auto dag = prune(SubstrateView(net), 0);
  ASSERT_EQ(dag.edges.size(), 2u);
  for (const auto& e : dag.edges) EXPECT_EQ(e.to, 0u);
}

TEST(Prune, SingleNeighbour) {
  SubstrateNetwork net;
  net.add_node("d", {});
  net.add_node("a", {});
  net.add_link("l", 0, 1, 5, 2, 0.5);
  const auto dag = prune(SubstrateView(net), 0);
  ASSERT_EQ(dag.edges.size(), 1u);
  EXPECT_EQ(dag.edges[0].from, 1u);
  EXPECT_EQ(dag.edges[0].to, 0u);
}

TEST(HyperlinkMetrics, Examples) {
  const ForwarderLink single[] = {{0.9, 10}};
  auto m = hyperlink_metrics(single);
  EXPECT_DOUBLE_EQ(m.pdr, 0.9);
  EXPECT_DOUBLE_EQ(m.delay, 10);
  EXPECT_NEAR(m.cost, 11.111, 1e-3);

  const ForwarderLink pair[] = {{0.5, 20}, {0.75, 20}};
  m = hyperlink_metrics(pair);
  EXPECT_NEAR(m.pdr, 0.875, 1e-15);
  EXPECT_EQ(m.delay, 20);
  EXPECT_NEAR(m.cost, 20 / 0.875, 1e-12);
  EXPECT_NEAR(m.cost, 22.857, 1e-3);

  const ForwarderLink perfect[] = {{0.3, 4}, {1.0, 9}, {0.2, 1}};
  m = hyperlink_metrics(perfect);
  EXPECT_EQ(m.pdr, 1.0);
  EXPECT_EQ(m.delay, 9);

  EXPECT_THROW(hyperlink_metrics({}), std::invalid_argument);
}

TEST(ForwarderWeights, Examples) {
  EXPECT_EQ(forwarder_weights(std::vector<double>{1.0}), (std::vector<double>{1.0}));

  auto w = forwarder_weights(std::vector<double>{0.9, 0.9});
  ASSERT_EQ(w.size(), 2u);
  EXPECT_NEAR(w[0], 0.9 / 0.99, 1e-15);
  EXPECT_NEAR(w[1], 0.09 / 0.99, 1e-15);
  EXPECT_NEAR(w[0], 0.9091, 1e-4);
  EXPECT_NEAR(w[1], 0.0909, 1e-4);

  w = forwarder_weights(std::vector<double>{0.5, 0.75});
  EXPECT_NEAR(w[0], 0.5 / 0.875, 1e-15);
  EXPECT_NEAR(w[1], 0.375 / 0.875, 1e-15);
  EXPECT_NEAR(w[0], 0.5714, 1e-4);
  EXPECT_NEAR(w[1], 0.4286, 1e-4);
  EXPECT_NEAR(w[0] + w[1], 1.0, 1e-12);
}

TEST(AnypathRoutes, ExampleFreshTowardN4) {
  Example ex;
  const auto table = anypath_routes(prune(SubstrateView(ex.net), ex.n("n4")));
  // Hyperlink n1 -> {n2, n3}: both receivers are one 10/0.9 hop away.
  const double expected = 10.0 / (1 - 0.1 * 0.1) + (0.9 / 0.99 + 0.09 / 0.99) * kLinkCost10;
  EXPECT_NEAR(table.cost[ex.n("n1")], expected, 1e-12);
  EXPECT_NEAR(table.cost[ex.n("n1")], 21.212, 1e-3);
  EXPECT_EQ(ex.receivers(table.forwarding[ex.n("n1")]), (std::vector<std::string>{"n2", "n3"}));
  EXPECT_EQ(ex.receivers(table.forwarding[ex.n("n2")]), (std::vector<std::string>{"n4"}));
  EXPECT_EQ(ex.receivers(table.forwarding[ex.n("n3")]), (std::vector<std::string>{"n4"}));
  EXPECT_EQ(table.forwarding[ex.n("n3")].forwarders[0].link, ex.l("l4"));
  EXPECT_EQ(table.cost[ex.n("n4")], 0.0);
  EXPECT_TRUE(table.forwarding[ex.n("n4")].forwarders.empty());
}

TEST(AnypathRoutes, ExampleAfterStepThreeTowardN4) {
  Example ex;
  ex.apply_first_three_steps();
  const auto view = bandwidth_subgraph(ex.net, 10);
  EXPECT_FALSE(view.enabled(ex.l("l2")));
  const auto table = anypath_routes(prune(view, ex.n("n4")));
  const double expected = 20.0 / 0.875 + (0.375 / 0.875) * kLinkCost10;
  EXPECT_NEAR(table.cost[ex.n("n5")], expected, 1e-12);
  EXPECT_NEAR(table.cost[ex.n("n5")], 27.62, 5e-3);
  EXPECT_EQ(ex.receivers(table.forwarding[ex.n("n5")]), (std::vector<std::string>{"n4", "n3"}));
  EXPECT_EQ(table.forwarding[ex.n("n5")].forwarders[0].link, ex.l("l6"));
  EXPECT_EQ(table.forwarding[ex.n("n5")].forwarders[1].link, ex.l("l5"));
  EXPECT_EQ(ex.receivers(table.forwarding[ex.n("n3")]), (std::vector<std::string>{"n4"}));
}

TEST(AnypathRoutes, ChainMatchesUnicast) {
  SubstrateNetwork net;
  for (int i = 0; i < 5; ++i) net.add_node("n" + std::to_string(i), {});
  net.add_link("a", 0, 1, 5, 3, 0.5);
  net.add_link("b", 1, 2, 5, 1, 0.8);
  net.add_link("c", 2, 3, 5, 7, 0.9);
  net.add_link("d", 3, 4, 5, 2, 1.0);
  const auto table = anypath_routes(prune(SubstrateView(net), 0));
  EXPECT_NEAR(table.cost[4], 2 / 1.0 + 7 / 0.9 + 1 / 0.8 + 3 / 0.5, 1e-12);
}

TEST(AnypathRoutes, UnreachableStaysInfinite) {
  SubstrateNetwork net;
  net.add_node("d", {});
  net.add_node("a", {});
  net.add_node("island", {});
  net.add_node("island2", {});
  net.add_link("l", 0, 1, 5, 2, 0.5);
  net.add_link("m", 2, 3, 5, 2, 0.5);
  const auto table = anypath_routes(prune(SubstrateView(net), 0));
  EXPECT_FALSE(table.reachable(2));
  EXPECT_FALSE(table.reachable(3));
  EXPECT_TRUE(table.forwarding[2].forwarders.empty());
  EXPECT_THROW(route_closure(table, 2), UnreachableSource);
}

TEST(RouteClosure, Examples) {
  Example ex;
  auto table = anypath_routes(prune(SubstrateView(ex.net), ex.n("n4")));
  auto closure = route_closure(table, ex.n("n1"));
  EXPECT_EQ(ex.ids(closure.links), (std::vector<std::string>{"l1", "l2", "l3", "l4"}));
  EXPECT_EQ(closure.nodes.size(), 4u);

  const auto self = route_closure(table, ex.n("n4"));
  EXPECT_TRUE(self.nodes.empty());
  EXPECT_TRUE(self.links.empty());

  ex.apply_first_three_steps();
  table = anypath_routes(prune(bandwidth_subgraph(ex.net, 10), ex.n("n4")));
  closure = route_closure(table, ex.n("n5"));
  EXPECT_EQ(ex.ids(closure.links), (std::vector<std::string>{"l4", "l5", "l6"}));
}

// ---- properties ----

TEST(AnypathProperty, ForwarderWeightsSumToOne) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pdr(1e-3, 1.0);
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> rhos(std::uniform_int_distribution<int>(1, 12)(rng));
    for (auto& r : rhos) r = std::bernoulli_distribution(0.05)(rng) ? 1.0 : pdr(rng);
    const auto w = forwarder_weights(rhos);
    double sum = 0.0;
    for (double x : w) {
      EXPECT_GE(x, 0.0);
      sum += x;
    }
    ASSERT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(AnypathProperty, HyperlinkGrowsMonotonically) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> pdr(1e-3, 1.0);
  std::uniform_real_distribution<double> delay(0.1, 50.0);
  for (int i = 0; i < 1000; ++i) {
    std::vector<ForwarderLink> members;
    double prev_pdr = 0.0, prev_delay = 0.0, best_single = 0.0;
    const int k = std::uniform_int_distribution<int>(1, 10)(rng);
    for (int m = 0; m < k; ++m) {
      members.push_back({pdr(rng), delay(rng)});
      best_single = std::max(best_single, members.back().pdr);
      const auto h = hyperlink_metrics(members);
      ASSERT_GE(h.pdr, prev_pdr);
      ASSERT_GE(h.delay, prev_delay);
      ASSERT_GE(h.pdr + 1e-15, best_single);
      prev_pdr = h.pdr;
      prev_delay = h.delay;
    }
  }
}

TEST(AnypathProperty, PrunedGraphsAreAcyclic) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 1000; ++i) {
    const auto net = testing::random_substrate(rng, 1, 14, 0.4);
    const NodeIndex dst = std::uniform_int_distribution<NodeIndex>(0, net.node_count() - 1)(rng);
    const int bw = std::uniform_int_distribution<int>(1, 40)(rng);
    const auto view = bandwidth_subgraph(net, bw);
    const auto dag = prune(view, dst);
    ASSERT_TRUE(is_acyclic(dag));
    const auto dist = unicast_distances(view, dst);
    const auto reference = testing::reference_distances(net, dst, [&](const SubstrateLink& l) { return l.bw >= bw; });
    for (NodeIndex n = 0; n < net.node_count(); ++n) {
      if (std::isinf(reference[n])) {
        ASSERT_TRUE(std::isinf(dist[n]));
      } else {
        ASSERT_NEAR(dist[n], reference[n], 1e-9);
      }
    }
    for (const auto& e : dag.edges) ASSERT_GT(dist[e.from], dist[e.to]);
  }
}

// On tree substrates every non-destination node keeps a single outgoing edge,
// so the anypath cost must collapse to the unicast d/rho path cost.
TEST(AnypathProperty, SingletonForwardingEqualsDijkstra) {
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<int> delay(1, 20);
  std::uniform_real_distribution<double> pdr(0.05, 1.0);
  for (int i = 0; i < 1000; ++i) {
    SubstrateNetwork net;
    const int n = std::uniform_int_distribution<int>(1, 20)(rng);
    for (int k = 0; k < n; ++k) net.add_node("n" + std::to_string(k), {});
    for (int k = 1; k < n; ++k) {
      const int parent = std::uniform_int_distribution<int>(0, k - 1)(rng);
      net.add_link("l" + std::to_string(k), k, parent, 10, delay(rng), pdr(rng));
    }
    const NodeIndex dst = std::uniform_int_distribution<NodeIndex>(0, n - 1)(rng);
    const SubstrateView view(net);
    const auto dag = prune(view, dst);
    for (NodeIndex v = 0; v < dag.node_count; ++v) {
      ASSERT_EQ(dag.outgoing[v].size(), v == dst ? 0u : 1u);
    }
    const auto table = anypath_routes(dag);
    const auto dist = unicast_distances(view, dst);
    for (NodeIndex v = 0; v < net.node_count(); ++v) ASSERT_NEAR(table.cost[v], dist[v], 1e-9);
  }
}

TEST(AnypathProperty, MatchesRecursiveEvaluation) {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 1000; ++i) {
    const auto net = testing::random_substrate(rng, 1, 6, 0.6);
    const NodeIndex dst = std::uniform_int_distribution<NodeIndex>(0, net.node_count() - 1)(rng);
    const auto table = anypath_routes(prune(SubstrateView(net), dst));
    std::map<NodeIndex, double> memo;
    for (NodeIndex v = 0; v < net.node_count(); ++v) {
      const double oracle = testing::recursive_eatt(table, v, memo);
      if (std::isinf(oracle)) {
        ASSERT_FALSE(table.reachable(v));
      } else {
        ASSERT_NEAR(table.cost[v], oracle, 1e-9) << "instance " << i << " node " << v;
      }
    }
  }
}

TEST(AnypathProperty, RouteTableInvariants) {
  std::mt19937_64 rng(16);
  for (int i = 0; i < 1000; ++i) {
    const auto net = testing::random_substrate(rng, 1, 12, 0.45);
    const NodeIndex dst = std::uniform_int_distribution<NodeIndex>(0, net.node_count() - 1)(rng);
    const auto table = anypath_routes(prune(bandwidth_subgraph(net, 5), dst));
    ASSERT_EQ(table.cost[dst], 0.0);
    ASSERT_TRUE(table.forwarding[dst].forwarders.empty());
    for (NodeIndex v = 0; v < net.node_count(); ++v) {
      if (!table.reachable(v)) {
        ASSERT_TRUE(table.forwarding[v].forwarders.empty());
        continue;
      }
      std::set<NodeIndex> receivers;
      for (const auto& f : table.forwarding[v].forwarders) {
        ASSERT_LT(table.cost[f.receiver], table.cost[v]) << "instance " << i;
        ASSERT_TRUE(receivers.insert(f.receiver).second);
        ASSERT_GE(net.link(f.link).bw, 5);
      }
      const auto closure = route_closure(table, v);
      if (v != dst) ASSERT_FALSE(closure.links.empty());
    }
  }
}

}  // namespace
}  // namespace qrpad
