#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qrpad/embedder.hpp"
#include "qrpad/metrics.hpp"
#include "qrpad/scenario.hpp"

namespace qrpad {

using json = nlohmann::json;

/// Malformed input. `field` is a JSON-pointer-like path to the culprit.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// {nodes:[{id,cpu,gpu,mem,functionals[]}], links:[{id,a,b,bw,delay,pdr}]}
SubstrateDescription substrate_from_json(const json& j);
json to_json(const SubstrateDescription& desc);

// {services:[{id,cpu,gpu,mem,functionals[]}], channels:[{id,src,dst,bw,max_delay,min_pdr}]}
VirtualRequest request_from_json(const json& j);
json to_json(const VirtualRequest& request);

// {alpha, beta, alpha_cost, beta_cost, gamma}; alpha may be a number or [cpu, gpu, mem].
Coefficients coefficients_from_json(const json& j, Coefficients defaults = {});
json to_json(const Coefficients& c);

json to_json(const Embedding& e, const SubstrateNetwork& net);
json to_json(const ValidationReport& report);
json to_json(const AnypathRouteTable& table, const SubstrateNetwork& net);

SimulationConfig simulation_config_from_json(const json& j);

/// Reads and parses a JSON file; parse errors become SchemaError on field "<file>".
json load_json_file(const std::string& path);

/// Decimal with 6 significant digits, '.' separator.
std::string format_number(double value);

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
void write_node_usage_csv(std::ostream& out, const std::vector<NodeUsageRow>& rows);
void write_link_usage_csv(std::ostream& out, const std::vector<LinkUsageRow>& rows);
void write_raw_csv(std::ostream& out, const std::vector<RawRow>& rows);

std::vector<SummaryRow> read_summary_csv(std::istream& in);
std::vector<NodeUsageRow> read_node_usage_csv(std::istream& in);
std::vector<LinkUsageRow> read_link_usage_csv(std::istream& in);
std::vector<RawRow> read_raw_csv(std::istream& in);

}  // namespace qrpad
