#include <doctest.h>

#include <filesystem>
#include <string>

#include "clustopt/error.hpp"
#include "clustopt/generators.hpp"
#include "clustopt/io.hpp"
#include "oracles.hpp"

using namespace clustopt;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected clustopt::Error");
  return Errc::IoError;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("edge list basics") {
  const Graph tri = parse_edge_list("% comment\n1 2\n2 3\n3 1\n");
  CHECK(tri == oracle::complete(3));

  const Graph one = parse_edge_list("1 1\n1 2\n");
  CHECK(one.num_nodes() == 2);
  CHECK(one.num_edges() == 1);

  IngestOptions strict;
  strict.drop_self_loops = false;
  CHECK(code_of([&] { parse_edge_list("1 1\n1 2\n", strict); }) == Errc::MalformedLine);
}

TEST_CASE("edge list ids, columns and duplicates") {
  // First-appearance compaction, direction ignored, timestamp ignored.
  const Graph g = parse_edge_list("10 20 1 1700000000\n20 10 1\n30 20 2.5 5\n");
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_edges() == 2);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 2));
  CHECK(*g.weight(1, 2) == 1.0);

  IngestOptions weighted;
  weighted.use_weights = true;
  const Graph w = parse_edge_list("10 20 1\n30 20 2.5\n", weighted);
  CHECK(*w.weight(1, 2) == 2.5);

  IngestOptions strict;
  strict.merge_duplicate_edges = false;
  CHECK(code_of([&] { parse_edge_list("1 2\n2 1\n", strict); }) == Errc::MalformedLine);
}

TEST_CASE("edge list errors") {
  CHECK(code_of([] { parse_edge_list("% only comments\n\n"); }) == Errc::EmptyGraph);
  CHECK(code_of([] { parse_edge_list("1 2\n3\n"); }) == Errc::MalformedLine);
  CHECK(message_of([] { parse_edge_list("1 2\n3 x\n"); }).starts_with("line 2:"));
  CHECK(code_of([] { parse_edge_list("1 2 1 2 3\n"); }) == Errc::MalformedLine);
}

TEST_CASE("largest component") {
  const std::string text = "1 2\n3 4\n4 5\n5 3\n";
  const Graph big = parse_edge_list(text);
  CHECK(big == oracle::complete(3));
  IngestOptions all;
  all.largest_component_only = false;
  CHECK(parse_edge_list(text, all).num_nodes() == 5);
}

TEST_CASE("ingestion is idempotent") {
  const Graph g = parse_edge_list("5 9\n9 7\n7 5\n7 2\n2 11\n");
  std::string text;
  for (const Edge& e : g.edges()) text += std::to_string(e.u) + " " + std::to_string(e.v) + "\n";
  CHECK(parse_edge_list(text) == g);
}

TEST_CASE("graph JSON round trip") {
  const Graph tri = oracle::complete(3);
  CHECK(graph_from_json(graph_to_json(tri)) == tri);
  CHECK(graph_to_json(tri) == R"({"version":1,"n":3,"edges":[[0,1,1.0],[0,2,1.0],[1,2,1.0]]})");

  Rng rng(3);
  const Graph hk = assign_random_weights(generate_hk({10000, 5, 2, 0}, rng), rng, 0.5, 1.5);
  CHECK(graph_from_json(graph_to_json(hk)) == hk);
}

TEST_CASE("graph JSON errors") {
  CHECK(code_of([] { graph_from_json(R"({"version":2,"n":1,"edges":[]})"); }) ==
        Errc::VersionMismatch);
  CHECK(code_of([] { graph_from_json("{"); }) == Errc::ParseError);
  CHECK(code_of([] { graph_from_json(R"({"version":1,"n":2,"edges":[[0,1]]})"); }) ==
        Errc::ParseError);
  CHECK(code_of([] { graph_from_json(R"({"version":1,"n":2,"edges":[[0,0,1]]})"); }) ==
        Errc::SelfLoop);
}

TEST_CASE("files") {
  const auto path = std::filesystem::temp_directory_path() / "clustopt_io_graph.json";
  write_graph(oracle::cycle(5), path);
  CHECK(read_graph(path) == oracle::cycle(5));
  std::filesystem::remove(path);
  CHECK(code_of([] { read_text("/nonexistent/clustopt/file"); }) == Errc::IoError);
  CHECK(code_of([] { write_text("/nonexistent/clustopt/file", "x"); }) == Errc::IoError);
}

TEST_CASE("trace CSV") {
  TrialTrace t;
  t.recorded_steps = {0, 10};
  t.gap = {1.5, 0.25};
  t.lyapunov = {2.0, 1.0};
  t.consensus_residual = {0.5, 0.125};
  t.tracking_residual = {0.0, 1e-17};
  CHECK(trace_to_csv(t) ==
        "step,gap,lyapunov,consensus_residual,tracking_residual\n"
        "0,1.5,2,0.5,0\n"
        "10,0.25,1,0.125,1e-17\n");
}

TEST_CASE("cost model JSON round trip") {
  Rng rng(1);
  const CostModel q(sample_quartic(5, rng));
  const CostModel qq = cost_model_from_json(cost_model_to_json(q));
  CHECK(qq.quartic()->a == q.quartic()->a);
  CHECK(qq.quartic()->b == q.quartic()->b);
  const CostModel m(sample_mlloss(3, 4, rng));
  const CostModel mm = cost_model_from_json(cost_model_to_json(m));
  CHECK(mm.mlloss()->a == m.mlloss()->a);
  CHECK(mm.mlloss()->m == 4);
  CHECK(code_of([] { cost_model_from_json(R"({"family":"cubic"})"); }) == Errc::ParseError);
}

TEST_CASE("rewire report JSON") {
  RewireReport r;
  r.swaps_attempted = 10;
  r.swaps_accepted = 3;
  r.initial_c = 0.25;
  r.final_c = 0.5;
  r.reached_target = true;
  CHECK(rewire_report_to_json(r) ==
        R"({"swaps_attempted":10,"swaps_accepted":3,"initial_c":0.25,"final_c":0.5,"reached_target":true})");
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}
