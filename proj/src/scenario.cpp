#include "qrpad/scenario.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qrpad/windowing.hpp"

namespace qrpad {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t iteration_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index));
}

int SimRng::uniform_int(int lo, int hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int with empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo) + 1;
  // Reject the top partial bucket so every value is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<int>(lo + static_cast<std::int64_t>(x % span));
}

double SimRng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double SimRng::uniform_open(double lo, double hi) {
  double x;
  do {
    x = lo + (hi - lo) * uniform01();
  } while (!(x > lo && x < hi));
  return x;
}

namespace {

Channel sample_channel(SimRng& rng, const GeneratorConfig& cfg, std::string id, std::string src,
                       std::string dst) {
  Channel c;
  c.id = std::move(id);
  c.src = std::move(src);
  c.dst = std::move(dst);
  c.bw = rng.uniform_int(cfg.bw.lo, cfg.bw.hi);
  c.max_delay = rng.uniform_int(cfg.delay.lo, cfg.delay.hi);
  c.min_pdr = rng.uniform_open(cfg.pdr_lo, cfg.pdr_hi);
  return c;
}

}  // namespace

VirtualRequest generate_request(SimRng& rng, const GeneratorConfig& cfg, std::string id) {
  VirtualRequest request(std::move(id));
  const int count = rng.uniform_int(cfg.services.lo, cfg.services.hi);
  std::vector<std::string> names;
  for (int i = 0; i < count; ++i) {
    NanoService s;
    s.id = "s" + std::to_string(i + 1);
    s.demand.cpu = rng.uniform_int(cfg.cpu.lo, cfg.cpu.hi);
    const bool wants_gpu = rng.bernoulli(cfg.gpu_probability);
    const int gpu = rng.uniform_int(cfg.gpu.lo, cfg.gpu.hi);
    s.demand.gpu = wants_gpu ? gpu : 0;
    s.demand.mem = rng.uniform_int(cfg.mem.lo, cfg.mem.hi);
    names.push_back(s.id);
    request.add_service(std::move(s));
  }

  std::vector<int> degree(count, 0);
  int next_channel = 1;
  auto connect = [&](int from, int to) {
    request.add_channel(sample_channel(rng, cfg, "c" + std::to_string(next_channel++), names[from],
                                       names[to]));
    ++degree[from];
    ++degree[to];
  };

  for (int i = 0; i < count; ++i) {
    for (int j = cfg.ordered_pairs ? 0 : i + 1; j < count; ++j) {
      if (i == j) continue;
      if (rng.bernoulli(cfg.channel_probability)) connect(i, j);
    }
  }

  if (cfg.connect_isolated && count > 1) {
    for (int i = 0; i < count; ++i) {
      if (degree[i] > 0) continue;
      int other = rng.uniform_int(0, count - 2);
      if (other >= i) ++other;
      connect(std::min(i, other), std::max(i, other));
    }
  }
  return request;
}

ExampleFixture example_fixture() {
  ExampleFixture fx;
  auto& net = fx.substrate;
  const auto n1 = net.add_node("n1", {50, 20, 30});
  const auto n2 = net.add_node("n2", {20, 20, 50});
  const auto n3 = net.add_node("n3", {10, 10, 10});
  const auto n4 = net.add_node("n4", {10, 30, 30});
  const auto n5 = net.add_node("n5", {20, 10, 50});
  net.add_link("l1", n1, n2, 70, 10, 0.9);
  net.add_link("l2", n1, n3, 80, 10, 0.9);
  net.add_link("l3", n2, n4, 100, 10, 0.9);
  net.add_link("l4", n3, n4, 70, 10, 0.9);
  net.add_link("l5", n3, n5, 100, 20, 0.75);
  net.add_link("l6", n4, n5, 100, 20, 0.5);

  auto& req = fx.request;
  req.set_id("example");
  req.add_service({"s1", {50, 20, 30}, {}});
  req.add_service({"s2", {10, 30, 20}, {}});
  req.add_service({"s3", {10, 0, 50}, {}});
  req.add_channel({"c1", "s1", "s2", 50, 20, 0.6});
  req.add_channel({"c2", "s1", "s3", 30, 50, 0.8});
  req.add_channel({"c3", "s2", "s3", 10, 30, 0.8});

  fx.coeffs.alpha = {1, 1, 1};
  fx.coeffs.beta = 1;
  fx.coeffs.alpha_cost = {1, 1, 1};
  fx.coeffs.beta_cost = 1;
  fx.coeffs.gamma = 500;
  return fx;
}

SubstrateNetwork evaluation_substrate() {
  SubstrateNetwork net;
  const Resources capacity[] = {{71, 30, 89},  {98, 41, 85}, {92, 47, 69}, {136, 45, 81},
                                {67, 33, 71},  {84, 30, 79}, {77, 46, 85}, {119, 50, 55},
                                {72, 44, 97}, {132, 36, 100}};
  for (int i = 0; i < 10; ++i) net.add_node("n" + std::to_string(i + 1), capacity[i]);

  struct Row {
    int a, b, bw, delay;
    double pdr;
  };
  const Row rows[] = {
      {1, 2, 84, 2, 0.93},  {1, 3, 90, 8, 0.99},  {1, 4, 51, 7, 0.99},  {2, 3, 59, 5, 0.90},
      {2, 4, 94, 10, 0.96}, {2, 5, 87, 8, 0.91},  {2, 6, 75, 3, 0.95},  {3, 4, 56, 2, 0.92},
      {3, 7, 74, 6, 0.91},  {3, 8, 76, 4, 0.95},  {4, 5, 65, 10, 0.95}, {4, 7, 52, 1, 0.94},
      {4, 8, 72, 4, 0.95},  {4, 9, 54, 3, 0.93},  {5, 6, 52, 8, 0.98},  {5, 9, 84, 9, 0.92},
      {6, 9, 93, 8, 0.98},  {6, 10, 56, 2, 0.96}, {8, 9, 56, 9, 0.96},  {9, 10, 74, 1, 0.90},
  };
  int k = 1;
  for (const auto& r : rows) {
    net.add_link("l" + std::to_string(k++), r.a - 1, r.b - 1, r.bw, r.delay, r.pdr);
  }
  return net;
}

SubstrateNetwork substrate_fixture(const std::string& name) {
  if (name == "evaluation") return evaluation_substrate();
  if (name == "example") return example_fixture().substrate;
  throw std::invalid_argument("substrate: unknown fixture '" + name + "'");
}

Coefficients SimulationConfig::default_simulation_coefficients() {
  Coefficients c;
  c.alpha = {1, 1, 1};
  c.beta = 3;
  c.alpha_cost = {1, 1, 1};
  c.beta_cost = 3;
  c.gamma = 3000;
  return c;
}

void SimulationConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("iterations: must be at least 1");
  if (pool_size < 0) throw std::invalid_argument("pool_size: must be non-negative");
  if (load_levels.empty()) throw std::invalid_argument("load_levels: must not be empty");
  for (int load : load_levels) {
    if (load < 1 || load > pool_size) {
      throw std::invalid_argument("load_levels: " + std::to_string(load) +
                                  " is outside [1, pool_size]");
    }
  }
  if (!coeffs.non_negative()) throw std::invalid_argument("coefficients: must be non-negative");
  auto check_range = [](const IntRange& r, const char* name, int floor) {
    if (r.lo > r.hi || r.lo < floor) {
      throw std::invalid_argument(std::string("generator.") + name + ": invalid range");
    }
  };
  check_range(generator.services, "services", 1);
  check_range(generator.cpu, "cpu", 0);
  check_range(generator.gpu, "gpu", 0);
  check_range(generator.mem, "mem", 0);
  check_range(generator.bw, "bw", 1);
  check_range(generator.delay, "delay", 1);
  auto check_probability = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument(std::string("generator.") + name + ": must lie in [0, 1]");
    }
  };
  check_probability(generator.gpu_probability, "gpu_probability");
  check_probability(generator.channel_probability, "channel_probability");
  if (!(generator.pdr_lo >= 0.0 && generator.pdr_lo < generator.pdr_hi && generator.pdr_hi <= 1.0)) {
    throw std::invalid_argument("generator.pdr: need 0 <= pdr_lo < pdr_hi <= 1");
  }
  substrate_fixture(substrate);
}

const SummaryRow& SimulationResults::summary_at(int load, const std::string& metric) const {
  for (const auto& row : summary) {
    if (row.load == load && row.metric == metric) return row;
  }
  throw std::out_of_range("no summary for " + metric + " at load " + std::to_string(load));
}

std::vector<VirtualRequest> request_pool(const SimulationConfig& cfg, int iteration) {
  SimRng rng(iteration_seed(cfg.seed, static_cast<std::uint64_t>(iteration)));
  std::vector<VirtualRequest> pool;
  pool.reserve(cfg.pool_size);
  for (int k = 0; k < cfg.pool_size; ++k) {
    pool.push_back(generate_request(rng, cfg.generator, "vnr" + std::to_string(k + 1)));
  }
  return pool;
}

namespace {

// Arithmetic mean and sample standard deviation, skipping NaN entries.
struct Moments {
  double mean;
  double stddev;
};

Moments moments(const std::vector<double>& xs) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double x : xs) {
    if (std::isnan(x)) continue;
    sum += x;
    ++n;
  }
  if (n == 0) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  const double mean = sum / static_cast<double>(n);
  if (n == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) {
    if (!std::isnan(x)) ss += (x - mean) * (x - mean);
  }
  return {mean, std::sqrt(ss / static_cast<double>(n - 1))};
}

}  // namespace

SimulationResults run_simulation(const SimulationConfig& cfg) {
  cfg.validate();
  const SubstrateNetwork fresh = substrate_fixture(cfg.substrate);
  const std::size_t loads = cfg.load_levels.size();

  SimulationResults results;
  // usage accumulators indexed [load][node|link]
  std::vector<std::vector<double>> services_sum(loads, std::vector<double>(fresh.node_count()));
  std::vector<std::vector<double>> channels_sum(loads, std::vector<double>(fresh.link_count()));
  std::vector<std::vector<Resources>> used_sum(loads, std::vector<Resources>(fresh.node_count()));
  std::vector<std::vector<double>> bw_sum(loads, std::vector<double>(fresh.link_count()));

  for (int it = 0; it < cfg.iterations; ++it) {
    const auto pool = request_pool(cfg, it);
    for (std::size_t li = 0; li < loads; ++li) {
      const int load = cfg.load_levels[li];
      const std::span<const VirtualRequest> window(pool.data(), static_cast<std::size_t>(load));
      SubstrateNetwork net = fresh;
      const auto outcome = process_window(net, window, cfg.coeffs);
      const auto m = evaluate_window(fresh, net, window, outcome, cfg.coeffs);
      results.raw.push_back({it, load, static_cast<int>(outcome.accepted_count()),
                             static_cast<int>(outcome.total()), m.acceptance_ratio, m.revenue,
                             m.cost, m.rc_ratio});
      for (std::size_t n = 0; n < m.usage.nodes.size(); ++n) {
        services_sum[li][n] += m.usage.nodes[n].services;
        used_sum[li][n] += m.usage.nodes[n].used;
      }
      for (std::size_t l = 0; l < m.usage.links.size(); ++l) {
        channels_sum[li][l] += m.usage.links[l].channels;
        bw_sum[li][l] += m.usage.links[l].bw_used;
      }
    }
  }

  const double iters = static_cast<double>(cfg.iterations);
  for (std::size_t li = 0; li < loads; ++li) {
    const int load = cfg.load_levels[li];
    std::vector<double> acc, rev, cst, rc;
    for (const auto& row : results.raw) {
      if (row.load != load) continue;
      acc.push_back(row.acceptance_ratio);
      rev.push_back(row.revenue);
      cst.push_back(row.cost);
      rc.push_back(row.rc_ratio);
    }
    for (const auto& [name, xs] : {std::pair<const char*, const std::vector<double>&>{"acceptance_ratio", acc},
                                   {"revenue", rev},
                                   {"cost", cst},
                                   {"rc_ratio", rc}}) {
      const auto mo = moments(xs);
      results.summary.push_back({load, name, mo.mean, mo.stddev});
    }
    for (NodeIndex n = 0; n < fresh.node_count(); ++n) {
      const auto& node = fresh.node(n);
      results.node_usage.push_back({load, node.id, services_sum[li][n] / iters,
                                    used_sum[li][n].cpu / iters, node.original.cpu,
                                    used_sum[li][n].gpu / iters, node.original.gpu,
                                    used_sum[li][n].mem / iters, node.original.mem});
    }
    for (LinkIndex l = 0; l < fresh.link_count(); ++l) {
      const auto& link = fresh.link(l);
      results.link_usage.push_back(
          {load, link.id, channels_sum[li][l] / iters, bw_sum[li][l] / iters, link.bw0});
    }
  }
  return results;
}

}  // namespace qrpad
