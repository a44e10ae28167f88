#include "clustopt/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "clustopt/error.hpp"

namespace clustopt {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& why) {
  throw Error(Errc::MalformedLine, "line " + std::to_string(line_no) + ": " + why);
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    malformed(line_no, "cannot parse '" + std::string(field) + "'");
  }
  return value;
}

std::uint64_t pair_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Graph parse_edge_list(std::string_view text, const IngestOptions& opts) {
  std::unordered_map<std::uint64_t, NodeId> compact;
  auto node_of = [&](std::uint64_t raw) {
    auto [it, inserted] = compact.try_emplace(raw, static_cast<NodeId>(compact.size()));
    return it->second;
  };
  std::vector<Edge> edges;
  std::unordered_set<std::uint64_t> seen;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '%' || line.front() == '#') continue;

    const auto fields = split_fields(line);
    if (fields.size() < 2 || fields.size() > 4) {
      malformed(line_no, "expected 'u v [weight [timestamp]]'");
    }
    const auto raw_u = parse_number<std::uint64_t>(fields[0], line_no);
    const auto raw_v = parse_number<std::uint64_t>(fields[1], line_no);
    double weight = 1.0;
    if (fields.size() >= 3) {
      const double parsed = parse_number<double>(fields[2], line_no);
      if (opts.use_weights) {
        if (!(parsed > 0.0)) malformed(line_no, "non-positive weight");
        weight = parsed;
      }
    }
    if (raw_u == raw_v) {
      if (opts.drop_self_loops) continue;
      malformed(line_no, "self-loop");
    }
    const NodeId u = node_of(raw_u);
    const NodeId v = node_of(raw_v);
    if (!seen.insert(pair_key(u, v)).second) {
      if (opts.merge_duplicate_edges) continue;
      malformed(line_no, "duplicate edge");
    }
    edges.push_back({u, v, weight});
  }
  if (compact.empty()) throw Error(Errc::EmptyGraph, "edge list contains no edges");

  Graph g = Graph::from_edges(compact.size(), edges);
  if (!opts.largest_component_only) return g;

  const auto comp = connected_components(g);
  std::unordered_map<std::size_t, std::size_t> sizes;
  for (std::size_t c : comp) ++sizes[c];
  std::size_t best = comp[0];
  for (auto [c, size] : sizes) {
    if (size > sizes[best] || (size == sizes[best] && c < best)) best = c;
  }
  std::vector<NodeId> keep;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    if (comp[i] == best) keep.push_back(i);
  }
  return keep.size() == g.num_nodes() ? g : induced_subgraph(g, keep);
}

std::string graph_to_json(const Graph& g) {
  ordered_json doc;
  doc["version"] = 1;
  doc["n"] = g.num_nodes();
  ordered_json edges = ordered_json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.u, e.v, e.weight});
  doc["edges"] = std::move(edges);
  return doc.dump();
}

Graph graph_from_json(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw Error(Errc::ParseError, std::string("graph JSON: ") + e.what());
  }
  try {
    const int version = doc.at("version").get<int>();
    if (version != 1) {
      throw Error(Errc::VersionMismatch,
                  "graph JSON version " + std::to_string(version) + " (expected 1)");
    }
    const auto n = doc.at("n").get<std::size_t>();
    std::vector<Edge> edges;
    for (const auto& item : doc.at("edges")) {
      if (!item.is_array() || item.size() != 3) {
        throw Error(Errc::ParseError, "graph JSON: edge entries must be [i, j, w]");
      }
      edges.push_back({item[0].get<NodeId>(), item[1].get<NodeId>(), item[2].get<double>()});
    }
    return Graph::from_edges(n, edges);
  } catch (const ordered_json::exception& e) {
    throw Error(Errc::ParseError, std::string("graph JSON: ") + e.what());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

Graph read_graph(const std::filesystem::path& path) { return graph_from_json(read_text(path)); }

void write_graph(const Graph& g, const std::filesystem::path& path) {
  write_text(path, graph_to_json(g) + "\n");
}

std::string trace_to_csv(const TrialTrace& trace) {
  std::string out = "step,gap,lyapunov,consensus_residual,tracking_residual\n";
  for (std::size_t k = 0; k < trace.recorded_steps.size(); ++k) {
    out += std::to_string(trace.recorded_steps[k]);
    for (double v : {trace.gap[k], trace.lyapunov[k], trace.consensus_residual[k],
                     trace.tracking_residual[k]}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

void write_trace(const TrialTrace& trace, const std::filesystem::path& path) {
  write_text(path, trace_to_csv(trace));
}

std::string cost_model_to_json(const CostModel& model) {
  ordered_json doc;
  doc["family"] = std::string(to_string(model.family()));
  if (const auto* ml = model.mlloss()) {
    doc["n"] = ml->n;
    doc["m"] = ml->m;
    doc["a"] = ml->a;
    doc["b"] = ml->b;
  } else {
    const auto* q = model.quartic();
    doc["a"] = q->a;
    doc["b"] = q->b;
  }
  return doc.dump();
}

CostModel cost_model_from_json(std::string_view text) {
  try {
    const auto doc = ordered_json::parse(text);
    const auto family = doc.at("family").get<std::string>();
    if (family == "mlloss") {
      return CostModel(MlLossModel{doc.at("n").get<std::size_t>(), doc.at("m").get<std::size_t>(),
                                   doc.at("a").get<std::vector<double>>(),
                                   doc.at("b").get<std::vector<double>>()});
    }
    if (family == "quartic") {
      return CostModel(QuarticModel{doc.at("a").get<std::vector<double>>(),
                                    doc.at("b").get<std::vector<double>>()});
    }
    throw Error(Errc::ParseError, "unknown cost family '" + family + "'");
  } catch (const ordered_json::exception& e) {
    throw Error(Errc::ParseError, std::string("cost JSON: ") + e.what());
  }
}

std::string rewire_report_to_json(const RewireReport& report) {
  ordered_json doc;
  doc["swaps_attempted"] = report.swaps_attempted;
  doc["swaps_accepted"] = report.swaps_accepted;
  doc["initial_c"] = report.initial_c;
  doc["final_c"] = report.final_c;
  doc["reached_target"] = report.reached_target;
  return doc.dump();
}

std::string scatter_to_csv(std::span<const ScatterRow> rows) {
  std::string out = "name,n,d,C,lambda2,rate\n";
  for (const ScatterRow& r : rows) {
    out += r.name + ',' + std::to_string(r.n) + ',' + format_double(r.d) + ',' +
           format_double(r.c) + ',' + (r.lambda2 ? format_double(*r.lambda2) : "") + ',' +
           (r.rate ? format_double(*r.rate) : "") + '\n';
  }
  return out;
}

}  // namespace clustopt
