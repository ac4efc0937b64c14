#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qrpad/embedder.hpp"
#include "qrpad/metrics.hpp"

namespace qrpad {

/// SplitMix64 finalizer; used to derive independent per-iteration seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of iteration `index` under `master`.
std::uint64_t iteration_seed(std::uint64_t master, std::uint64_t index);

/// Reproducible sampling on top of mt19937_64. The std distributions are
/// implementation-defined, so bounded draws are done here.
class SimRng {
 public:
  explicit SimRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);
  /// Uniform real in [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform real in the open interval (lo, hi).
  double uniform_open(double lo, double hi);
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

struct IntRange {
  int lo;
  int hi;
};

struct GeneratorConfig {
  IntRange services{2, 7};
  IntRange cpu{1, 10};
  IntRange gpu{1, 10};
  double gpu_probability = 0.25;
  IntRange mem{1, 5};
  double channel_probability = 0.3;
  IntRange bw{1, 10};
  IntRange delay{10, 50};
  double pdr_lo = 0.5;
  double pdr_hi = 1.0;
  bool ordered_pairs = false;      // one Bernoulli per ordered pair instead of per unordered pair
  bool connect_isolated = true;    // add one channel to every service left without any
};

VirtualRequest generate_request(SimRng& rng, const GeneratorConfig& cfg, std::string id = "vnr");

struct ExampleFixture {
  SubstrateNetwork substrate;
  VirtualRequest request;
  Coefficients coeffs;
};

/// Five-node walkthrough substrate, three-service request, alpha = beta = 1, gamma = 500.
ExampleFixture example_fixture();

/// Ten-node, twenty-link evaluation substrate.
SubstrateNetwork evaluation_substrate();

struct SimulationConfig {
  std::string substrate = "evaluation";  // fixture name: "evaluation" or "example"
  std::vector<int> load_levels{10, 20, 30, 40, 50};
  int iterations = 100;
  std::uint64_t seed = 1;
  int pool_size = 50;
  Coefficients coeffs = default_simulation_coefficients();
  GeneratorConfig generator;

  static Coefficients default_simulation_coefficients();
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

SubstrateNetwork substrate_fixture(const std::string& name);

struct RawRow {
  int iteration;
  int load;
  int accepted;
  int total;
  double acceptance_ratio;
  double revenue;
  double cost;
  double rc_ratio;  // NaN when nothing was accepted
};

struct SummaryRow {
  int load;
  std::string metric;
  double mean;
  double stddev;
};

struct NodeUsageRow {
  int load;
  std::string node;
  double services_mean;
  double cpu_used_mean;
  int cpu_total;
  double gpu_used_mean;
  int gpu_total;
  double mem_used_mean;
  int mem_total;
};

struct LinkUsageRow {
  int load;
  std::string link;
  double channels_mean;
  double bw_used_mean;
  int bw_total;
};

struct SimulationResults {
  std::vector<RawRow> raw;
  std::vector<SummaryRow> summary;
  std::vector<NodeUsageRow> node_usage;
  std::vector<LinkUsageRow> link_usage;

  /// Mean of `metric` at `load`; throws std::out_of_range when absent.
  const SummaryRow& summary_at(int load, const std::string& metric) const;
};

/// The request pool of one iteration (pool_size requests from its own seed).
std::vector<VirtualRequest> request_pool(const SimulationConfig& cfg, int iteration);

SimulationResults run_simulation(const SimulationConfig& cfg);

}  // namespace qrpad
