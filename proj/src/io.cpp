#include "qrpad/io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <locale>
#include <ostream>
#include <set>
#include <sstream>

namespace qrpad {

namespace {

std::string at(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string at(const std::string& path, std::size_t index) {
  return path + "/" + std::to_string(index);
}

const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(at(path, key), "missing required field");
  return *it;
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw SchemaError(at(path, key), "unknown field");
  }
}

std::string get_string(const json& obj, const std::string& path, const char* key) {
  const auto& v = require(obj, path, key);
  if (!v.is_string()) throw SchemaError(at(path, key), "expected a string");
  return v.get<std::string>();
}

int get_int(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw SchemaError(field, "expected an integer");
  const auto x = v.get<long long>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw SchemaError(field, "integer out of range");
  }
  return static_cast<int>(x);
}

int get_int(const json& obj, const std::string& path, const char* key) {
  return get_int(require(obj, path, key), at(path, key));
}

double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw SchemaError(field, "expected a number");
  return v.get<double>();
}

double get_number(const json& obj, const std::string& path, const char* key) {
  return get_number(require(obj, path, key), at(path, key));
}

bool get_bool(const json& v, const std::string& field) {
  if (!v.is_boolean()) throw SchemaError(field, "expected a boolean");
  return v.get<bool>();
}

Capabilities get_functionals(const json& obj, const std::string& path) {
  Capabilities out;
  auto it = obj.find("functionals");
  if (it == obj.end()) return out;
  const std::string field = at(path, "functionals");
  if (!it->is_array()) throw SchemaError(field, "expected an array of strings");
  for (std::size_t i = 0; i < it->size(); ++i) {
    if (!(*it)[i].is_string()) throw SchemaError(at(field, i), "expected a string");
    out.insert((*it)[i].get<std::string>());
  }
  return out;
}

const json& get_array(const json& obj, const std::string& path, const char* key) {
  const auto& v = require(obj, path, key);
  if (!v.is_array()) throw SchemaError(at(path, key), "expected an array");
  return v;
}

Resources get_resources(const json& obj, const std::string& path) {
  return {get_int(obj, path, "cpu"), get_int(obj, path, "gpu"), get_int(obj, path, "mem")};
}

json functionals_json(const Capabilities& f) { return json(std::vector<std::string>(f.begin(), f.end())); }

IntRange get_range(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2) throw SchemaError(field, "expected [lo, hi]");
  return {get_int(v[0], at(field, 0)), get_int(v[1], at(field, 1))};
}

std::array<double, 3> get_triple(const json& v, const std::string& field) {
  if (v.is_number()) {
    const double x = v.get<double>();
    return {x, x, x};
  }
  if (!v.is_array() || v.size() != 3) throw SchemaError(field, "expected a number or [cpu, gpu, mem]");
  return {get_number(v[0], at(field, 0)), get_number(v[1], at(field, 1)),
          get_number(v[2], at(field, 2))};
}

}  // namespace

SubstrateDescription substrate_from_json(const json& j) {
  const std::string root;
  if (!j.is_object()) throw SchemaError("/", "expected an object");
  reject_unknown(j, root, {"nodes", "links"});
  SubstrateDescription desc;
  const auto& nodes = get_array(j, root, "nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = at("/nodes", i);
    if (!nodes[i].is_object()) throw SchemaError(path, "expected an object");
    reject_unknown(nodes[i], path, {"id", "cpu", "gpu", "mem", "functionals"});
    desc.nodes.push_back({get_string(nodes[i], path, "id"), get_resources(nodes[i], path),
                          get_functionals(nodes[i], path)});
  }
  const auto& links = get_array(j, root, "links");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string path = at("/links", i);
    if (!links[i].is_object()) throw SchemaError(path, "expected an object");
    reject_unknown(links[i], path, {"id", "a", "b", "bw", "delay", "pdr"});
    desc.links.push_back({get_string(links[i], path, "id"), get_string(links[i], path, "a"),
                          get_string(links[i], path, "b"), get_int(links[i], path, "bw"),
                          get_number(links[i], path, "delay"), get_number(links[i], path, "pdr")});
  }
  return desc;
}

json to_json(const SubstrateDescription& desc) {
  json nodes = json::array();
  for (const auto& n : desc.nodes) {
    nodes.push_back({{"id", n.id},
                     {"cpu", n.capacity.cpu},
                     {"gpu", n.capacity.gpu},
                     {"mem", n.capacity.mem},
                     {"functionals", functionals_json(n.functionals)}});
  }
  json links = json::array();
  for (const auto& l : desc.links) {
    links.push_back({{"id", l.id}, {"a", l.a}, {"b", l.b}, {"bw", l.bw}, {"delay", l.delay}, {"pdr", l.pdr}});
  }
  return {{"nodes", nodes}, {"links", links}};
}

VirtualRequest request_from_json(const json& j) {
  const std::string root;
  if (!j.is_object()) throw SchemaError("/", "expected an object");
  reject_unknown(j, root, {"id", "services", "channels"});
  VirtualRequest request(j.contains("id") ? get_string(j, root, "id") : std::string("request"));
  const auto& services = get_array(j, root, "services");
  for (std::size_t i = 0; i < services.size(); ++i) {
    const std::string path = at("/services", i);
    if (!services[i].is_object()) throw SchemaError(path, "expected an object");
    reject_unknown(services[i], path, {"id", "cpu", "gpu", "mem", "functionals"});
    try {
      request.add_service({get_string(services[i], path, "id"), get_resources(services[i], path),
                           get_functionals(services[i], path)});
    } catch (const InvalidRequest& e) {
      throw SchemaError(path, e.what());
    }
  }
  const auto& channels = get_array(j, root, "channels");
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const std::string path = at("/channels", i);
    if (!channels[i].is_object()) throw SchemaError(path, "expected an object");
    reject_unknown(channels[i], path, {"id", "src", "dst", "bw", "max_delay", "min_pdr"});
    Channel c{get_string(channels[i], path, "id"),      get_string(channels[i], path, "src"),
              get_string(channels[i], path, "dst"),     get_int(channels[i], path, "bw"),
              get_number(channels[i], path, "max_delay"), get_number(channels[i], path, "min_pdr")};
    try {
      request.add_channel(std::move(c));
    } catch (const InvalidRequest& e) {
      throw SchemaError(path, e.what());
    }
  }
  return request;
}

json to_json(const VirtualRequest& request) {
  json services = json::array();
  for (const auto& s : request.services()) {
    services.push_back({{"id", s.id},
                        {"cpu", s.demand.cpu},
                        {"gpu", s.demand.gpu},
                        {"mem", s.demand.mem},
                        {"functionals", functionals_json(s.functionals)}});
  }
  json channels = json::array();
  for (const auto& c : request.channels()) {
    channels.push_back({{"id", c.id},
                        {"src", c.src},
                        {"dst", c.dst},
                        {"bw", c.bw},
                        {"max_delay", c.max_delay},
                        {"min_pdr", c.min_pdr}});
  }
  return {{"id", request.id()}, {"services", services}, {"channels", channels}};
}

Coefficients coefficients_from_json(const json& j, Coefficients c) {
  const std::string root;
  if (!j.is_object()) throw SchemaError("/", "expected an object");
  reject_unknown(j, root, {"alpha", "beta", "alpha_cost", "beta_cost", "gamma"});
  if (j.contains("alpha")) c.alpha = get_triple(j["alpha"], "/alpha");
  if (j.contains("beta")) c.beta = get_number(j, root, "beta");
  if (j.contains("alpha_cost")) c.alpha_cost = get_triple(j["alpha_cost"], "/alpha_cost");
  if (j.contains("beta_cost")) c.beta_cost = get_number(j, root, "beta_cost");
  if (j.contains("gamma")) c.gamma = get_number(j, root, "gamma");
  if (!c.non_negative()) throw SchemaError("/", "coefficients must be non-negative");
  return c;
}

json to_json(const Coefficients& c) {
  return {{"alpha", c.alpha}, {"beta", c.beta}, {"alpha_cost", c.alpha_cost},
          {"beta_cost", c.beta_cost}, {"gamma", c.gamma}};
}

json to_json(const Embedding& e, const SubstrateNetwork& net) {
  json services = json::object();
  for (const auto& [service, node] : e.service_nodes) services[service] = net.node(node).id;
  json channels = json::array();
  for (const auto& r : e.channel_routes) {
    json links = json::array();
    for (LinkIndex l : r.route.links) links.push_back(net.link(l).id);
    json hyperlinks = json::array();
    for (const auto& h : r.route.hyperlinks) {
      json forwarders = json::array();
      for (const auto& f : h.forwarders) {
        forwarders.push_back({{"node", net.node(f.receiver).id}, {"link", net.link(f.link).id}});
      }
      hyperlinks.push_back({{"transmitter", net.node(h.transmitter).id}, {"forwarders", forwarders}});
    }
    channels.push_back({{"id", r.channel},
                        {"src_node", net.node(r.src_node).id},
                        {"dst_node", net.node(r.dst_node).id},
                        {"eatt", r.eatt},
                        {"max_cost", r.max_cost},
                        {"reversed", r.reversed},
                        {"links", links},
                        {"hyperlinks", hyperlinks}});
  }
  return {{"services", services}, {"channels", channels}};
}

json to_json(const ValidationReport& report) {
  json out = json::array();
  for (const auto& v : report) {
    out.push_back({{"kind", to_string(v.kind)}, {"subject", v.subject}, {"message", v.message}});
  }
  return out;
}

json to_json(const AnypathRouteTable& table, const SubstrateNetwork& net) {
  json nodes = json::array();
  for (NodeIndex n = 0; n < table.cost.size(); ++n) {
    json forwarders = json::array();
    for (const auto& f : table.forwarding[n].forwarders) {
      forwarders.push_back({{"node", net.node(f.receiver).id}, {"link", net.link(f.link).id}});
    }
    nodes.push_back({{"node", net.node(n).id},
                     {"eatt", table.reachable(n) ? json(table.cost[n]) : json(nullptr)},
                     {"forwarders", forwarders}});
  }
  return {{"destination", net.node(table.destination).id}, {"nodes", nodes}};
}

SimulationConfig simulation_config_from_json(const json& j) {
  const std::string root;
  if (!j.is_object()) throw SchemaError("/", "expected an object");
  reject_unknown(j, root,
                 {"substrate", "load_levels", "iterations", "seed", "pool_size", "coefficients", "generator"});
  SimulationConfig cfg;
  if (j.contains("substrate")) cfg.substrate = get_string(j, root, "substrate");
  if (j.contains("load_levels")) {
    const auto& levels = get_array(j, root, "load_levels");
    cfg.load_levels.clear();
    for (std::size_t i = 0; i < levels.size(); ++i) {
      cfg.load_levels.push_back(get_int(levels[i], at("/load_levels", i)));
    }
  }
  if (j.contains("iterations")) cfg.iterations = get_int(j, root, "iterations");
  if (j.contains("seed")) {
    const auto& v = j["seed"];
    if (!v.is_number_unsigned()) throw SchemaError("/seed", "expected a non-negative integer");
    cfg.seed = v.get<std::uint64_t>();
  }
  if (j.contains("pool_size")) cfg.pool_size = get_int(j, root, "pool_size");
  if (j.contains("coefficients")) {
    try {
      cfg.coeffs = coefficients_from_json(j["coefficients"], cfg.coeffs);
    } catch (const SchemaError& e) {
      throw SchemaError("/coefficients" + (e.field() == "/" ? std::string() : e.field()),
                        std::string(e.what()).substr(e.field().size() + 2));
    }
  }
  if (j.contains("generator")) {
    const auto& g = j["generator"];
    const std::string path = "/generator";
    if (!g.is_object()) throw SchemaError(path, "expected an object");
    reject_unknown(g, path,
                   {"services", "cpu", "gpu", "gpu_probability", "mem", "channel_probability", "bw",
                    "delay", "pdr", "ordered_pairs", "connect_isolated"});
    auto& gen = cfg.generator;
    if (g.contains("services")) gen.services = get_range(g["services"], at(path, "services"));
    if (g.contains("cpu")) gen.cpu = get_range(g["cpu"], at(path, "cpu"));
    if (g.contains("gpu")) gen.gpu = get_range(g["gpu"], at(path, "gpu"));
    if (g.contains("mem")) gen.mem = get_range(g["mem"], at(path, "mem"));
    if (g.contains("bw")) gen.bw = get_range(g["bw"], at(path, "bw"));
    if (g.contains("delay")) gen.delay = get_range(g["delay"], at(path, "delay"));
    if (g.contains("gpu_probability")) gen.gpu_probability = get_number(g, path, "gpu_probability");
    if (g.contains("channel_probability")) {
      gen.channel_probability = get_number(g, path, "channel_probability");
    }
    if (g.contains("pdr")) {
      const auto& p = g["pdr"];
      if (!p.is_array() || p.size() != 2) throw SchemaError(at(path, "pdr"), "expected [lo, hi]");
      gen.pdr_lo = get_number(p[0], at(path, "pdr/0"));
      gen.pdr_hi = get_number(p[1], at(path, "pdr/1"));
    }
    if (g.contains("ordered_pairs")) gen.ordered_pairs = get_bool(g["ordered_pairs"], at(path, "ordered_pairs"));
    if (g.contains("connect_isolated")) {
      gen.connect_isolated = get_bool(g["connect_isolated"], at(path, "connect_isolated"));
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    const auto colon = what.find(':');
    throw SchemaError("/" + what.substr(0, colon), what.substr(colon + 2));
  }
  return cfg;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path, std::string("malformed JSON: ") + e.what());
  }
}

std::string format_number(double value) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << std::setprecision(6) << value;
  return out.str();
}

namespace {

std::vector<std::vector<std::string>> read_rows(std::istream& in, const std::string& header) {
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw SchemaError("csv", "expected header '" + header + "'");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

double parse_double(const std::string& s) {
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  double x = 0.0;
  in >> x;
  if (!in || !in.eof()) throw SchemaError("csv", "not a number: '" + s + "'");
  return x;
}

int parse_int(const std::string& s) {
  std::size_t used = 0;
  const int x = std::stoi(s, &used);
  if (used != s.size()) throw SchemaError("csv", "not an integer: '" + s + "'");
  return x;
}

void expect_width(const std::vector<std::string>& row, std::size_t n) {
  if (row.size() != n) throw SchemaError("csv", "expected " + std::to_string(n) + " columns");
}

const char* kSummaryHeader = "load,metric,mean,stddev";
const char* kNodeHeader =
    "load,node,services_mean,cpu_used_mean,cpu_total,gpu_used_mean,gpu_total,mem_used_mean,mem_total";
const char* kLinkHeader = "load,link,channels_mean,bw_used_mean,bw_total";
const char* kRawHeader = "iteration,load,accepted,total,acceptance_ratio,revenue,cost,rc_ratio";

}  // namespace

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << r.load << ',' << r.metric << ',' << format_number(r.mean) << ','
        << format_number(r.stddev) << '\n';
  }
}

void write_node_usage_csv(std::ostream& out, const std::vector<NodeUsageRow>& rows) {
  out << kNodeHeader << '\n';
  for (const auto& r : rows) {
    out << r.load << ',' << r.node << ',' << format_number(r.services_mean) << ','
        << format_number(r.cpu_used_mean) << ',' << r.cpu_total << ','
        << format_number(r.gpu_used_mean) << ',' << r.gpu_total << ','
        << format_number(r.mem_used_mean) << ',' << r.mem_total << '\n';
  }
}

void write_link_usage_csv(std::ostream& out, const std::vector<LinkUsageRow>& rows) {
  out << kLinkHeader << '\n';
  for (const auto& r : rows) {
    out << r.load << ',' << r.link << ',' << format_number(r.channels_mean) << ','
        << format_number(r.bw_used_mean) << ',' << r.bw_total << '\n';
  }
}

void write_raw_csv(std::ostream& out, const std::vector<RawRow>& rows) {
  out << kRawHeader << '\n';
  for (const auto& r : rows) {
    out << r.iteration << ',' << r.load << ',' << r.accepted << ',' << r.total << ','
        << format_number(r.acceptance_ratio) << ',' << format_number(r.revenue) << ','
        << format_number(r.cost) << ',' << format_number(r.rc_ratio) << '\n';
  }
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  std::vector<SummaryRow> out;
  for (const auto& row : read_rows(in, kSummaryHeader)) {
    expect_width(row, 4);
    out.push_back({parse_int(row[0]), row[1], parse_double(row[2]), parse_double(row[3])});
  }
  return out;
}

std::vector<NodeUsageRow> read_node_usage_csv(std::istream& in) {
  std::vector<NodeUsageRow> out;
  for (const auto& row : read_rows(in, kNodeHeader)) {
    expect_width(row, 9);
    out.push_back({parse_int(row[0]), row[1], parse_double(row[2]), parse_double(row[3]),
                   parse_int(row[4]), parse_double(row[5]), parse_int(row[6]), parse_double(row[7]),
                   parse_int(row[8])});
  }
  return out;
}

std::vector<LinkUsageRow> read_link_usage_csv(std::istream& in) {
  std::vector<LinkUsageRow> out;
  for (const auto& row : read_rows(in, kLinkHeader)) {
    expect_width(row, 5);
    out.push_back({parse_int(row[0]), row[1], parse_double(row[2]), parse_double(row[3]),
                   parse_int(row[4])});
  }
  return out;
}

std::vector<RawRow> read_raw_csv(std::istream& in) {
  std::vector<RawRow> out;
  for (const auto& row : read_rows(in, kRawHeader)) {
    expect_width(row, 8);
    out.push_back({parse_int(row[0]), parse_int(row[1]), parse_int(row[2]), parse_int(row[3]),
                   parse_double(row[4]), parse_double(row[5]), parse_double(row[6]),
                   parse_double(row[7])});
  }
  return out;
}

}  // namespace qrpad
