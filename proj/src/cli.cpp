#include "qrpad/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "qrpad/io.hpp"
#include "qrpad/scenario.hpp"
#include "qrpad/windowing.hpp"

namespace qrpad {

namespace {

std::string link_list(const SubstrateNetwork& net, const std::vector<LinkIndex>& links) {
  std::string out = "{";
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (i > 0) out += ", ";
    out += net.link(links[i]).id;
  }
  return out + "}";
}

// Expected outcome of the walkthrough: mapping, routes and residual state.
std::vector<std::string> example_mismatches(const SubstrateNetwork& net, const VirtualRequest& req,
                                            const Coefficients& coeffs, const EmbedResult& result) {
  std::vector<std::string> bad;
  const auto* e = std::get_if<Embedding>(&result);
  if (e == nullptr) return {"request was blocked"};

  const std::vector<std::string> order{"c1", "c2", "c3"};
  const std::vector<double> revenue{225.0, 198.0, 430.0 / 3.0};
  const auto computed = channel_order(req, coeffs);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& c = req.channels()[computed.at(i)];
    if (c.id != order[i]) bad.push_back("channel order position " + std::to_string(i) + " is " + c.id);
    if (std::abs(pair_quality_revenue(c, req, coeffs) - revenue[i]) > 1e-6) {
      bad.push_back("pair quality-revenue of " + c.id);
    }
  }
  const std::map<std::string, std::string> mapping{{"s1", "n1"}, {"s2", "n4"}, {"s3", "n5"}};
  for (const auto& [s, n] : mapping) {
    if (net.node(e->service_nodes.at(s)).id != n) bad.push_back(s + " not on " + n);
  }
  const std::map<std::string, std::string> routes{
      {"c1", "{l1, l2, l3, l4}"}, {"c2", "{l2, l5}"}, {"c3", "{l4, l5, l6}"}};
  for (const auto& [c, links] : routes) {
    if (link_list(net, e->route_of(c).route.links) != links) bad.push_back(c + " route differs");
  }
  const std::map<std::string, Resources> nodes{
      {"n1", {0, 0, 0}}, {"n2", {20, 20, 50}}, {"n3", {10, 10, 10}}, {"n4", {0, 0, 10}}, {"n5", {10, 10, 0}}};
  for (const auto& [n, r] : nodes) {
    if (net.node(net.node_index(n)).available != r) bad.push_back("residual of " + n);
  }
  const std::map<std::string, int> links{{"l1", 20}, {"l2", 0},  {"l3", 50},
                                         {"l4", 10}, {"l5", 60}, {"l6", 90}};
  for (const auto& [l, bw] : links) {
    if (net.link(net.link_index(l)).bw != bw) bad.push_back("residual of " + l);
  }
  return bad;
}

int run_example(std::ostream& out) {
  auto fx = example_fixture();
  out << "channel order (pair quality-revenue):\n";
  for (std::size_t i : channel_order(fx.request, fx.coeffs)) {
    const auto& c = fx.request.channels()[i];
    out << "  " << c.id << " " << format_number(pair_quality_revenue(c, fx.request, fx.coeffs)) << "\n";
  }
  const auto result = embed(fx.substrate, fx.request, fx.coeffs);
  const auto& net = fx.substrate;
  if (const auto* e = std::get_if<Embedding>(&result)) {
    out << "service mapping:\n";
    for (const auto& s : fx.request.services()) {
      out << "  " << s.id << " -> " << net.node(e->service_nodes.at(s.id)).id << "\n";
    }
    out << "channel routes:\n";
    for (const auto& r : e->channel_routes) {
      out << "  " << r.channel << ": " << net.node(r.src_node).id << " -> " << net.node(r.dst_node).id
          << " eatt " << format_number(r.eatt) << " <= " << format_number(r.max_cost) << " links "
          << link_list(net, r.route.links) << "\n";
      for (const auto& h : r.route.hyperlinks) {
        out << "    " << net.node(h.transmitter).id << " ->";
        for (const auto& f : h.forwarders) out << " " << net.node(f.receiver).id << "(" << net.link(f.link).id << ")";
        out << "\n";
      }
    }
  } else {
    const auto& f = std::get<EmbedFailure>(result);
    out << "blocked: " << to_string(f.reason) << " " << f.subject << "\n";
  }
  out << "residual nodes (cpu gpu mem):\n";
  for (const auto& n : net.nodes()) {
    out << "  " << n.id << " " << n.available.cpu << " " << n.available.gpu << " " << n.available.mem << "\n";
  }
  out << "residual links (bw):\n";
  for (const auto& l : net.links()) out << "  " << l.id << " " << l.bw << "\n";

  const auto bad = example_mismatches(net, fx.request, fx.coeffs, result);
  if (bad.empty()) {
    out << "golden check: OK\n";
    return kExitOk;
  }
  for (const auto& b : bad) out << "golden check: MISMATCH " << b << "\n";
  return kExitInvariantViolation;
}

int run_embed(const std::string& substrate_path, const std::string& request_path,
              const std::string& coeffs_path, std::ostream& out) {
  auto net = SubstrateNetwork::from_description(substrate_from_json(load_json_file(substrate_path)));
  const auto request = request_from_json(load_json_file(request_path));
  const Coefficients coeffs =
      coeffs_path.empty() ? Coefficients{} : coefficients_from_json(load_json_file(coeffs_path));
  const auto result = embed(net, request, coeffs);
  if (const auto* e = std::get_if<Embedding>(&result)) {
    json doc = to_json(*e, net);
    doc["accepted"] = true;
    doc["request"] = request.id();
    out << doc.dump(2) << "\n";
    return kExitOk;
  }
  const auto& f = std::get<EmbedFailure>(result);
  json doc{{"accepted", false},
           {"request", request.id()},
           {"error", to_string(f.reason)},
           {"subject", f.subject},
           {"message", f.message}};
  out << doc.dump(2) << "\n";
  return kExitBlocked;
}

int run_validate(const std::string& substrate_path, std::ostream& out) {
  const auto desc = substrate_from_json(load_json_file(substrate_path));
  const auto report = validate_substrate(desc);
  out << json{{"valid", report.empty()}, {"violations", to_json(report)}}.dump(2) << "\n";
  return report.empty() ? kExitOk : kExitInputError;
}

void write_file(const std::filesystem::path& path, auto&& writer) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw SchemaError(path.string(), "cannot open for writing");
  writer(file);
  if (!file) throw SchemaError(path.string(), "write failed");
}

int run_simulate(const std::string& config_path, const std::string& out_dir, std::ostream& out) {
  const SimulationConfig cfg =
      config_path.empty() ? SimulationConfig{} : simulation_config_from_json(load_json_file(config_path));
  const auto results = run_simulation(cfg);
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "summary.csv", [&](std::ostream& f) { write_summary_csv(f, results.summary); });
  write_file(dir / "node_usage.csv", [&](std::ostream& f) { write_node_usage_csv(f, results.node_usage); });
  write_file(dir / "link_usage.csv", [&](std::ostream& f) { write_link_usage_csv(f, results.link_usage); });
  write_file(dir / "raw.csv", [&](std::ostream& f) { write_raw_csv(f, results.raw); });
  for (const auto& row : results.summary) {
    out << "load " << row.load << " " << row.metric << " mean " << format_number(row.mean) << " stddev "
        << format_number(row.stddev) << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"QRPAD-VNE embedding simulator", "qrpad"};
  app.require_subcommand(1, 1);

  auto* example = app.add_subcommand("example", "Embed the five-node walkthrough and check it");

  std::string substrate_path, request_path, coeffs_path;
  auto* embed_cmd = app.add_subcommand("embed", "Embed one request and print the mapping as JSON");
  embed_cmd->add_option("--substrate", substrate_path, "Substrate JSON")->required();
  embed_cmd->add_option("--request", request_path, "Request JSON")->required();
  embed_cmd->add_option("--coeffs", coeffs_path, "Coefficients JSON");

  std::string config_path, out_dir;
  auto* simulate = app.add_subcommand("simulate", "Run the Monte-Carlo sweep and write CSV files");
  simulate->add_option("--config", config_path, "Simulation config JSON (defaults if omitted)");
  simulate->add_option("--out", out_dir, "Output directory")->required();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a substrate JSON file");
  validate->add_option("--substrate", validate_path, "Substrate JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (example->parsed()) return run_example(out);
    if (embed_cmd->parsed()) return run_embed(substrate_path, request_path, coeffs_path, out);
    if (simulate->parsed()) return run_simulate(config_path, out_dir, out);
    if (validate->parsed()) return run_validate(validate_path, out);
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const InvalidSubstrate& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const InvalidRequest& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInvariantViolation;
  }
  return kExitInputError;
}

}  // namespace qrpad
