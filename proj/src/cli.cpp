#include "gqbe/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>

#include "gqbe/engine.hpp"
#include "gqbe/metrics.hpp"
#include "gqbe/service.hpp"

namespace gqbe {
namespace {

std::vector<std::string> split_tuple(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto bar = text.find('|', start);
    out.push_back(text.substr(start, bar == std::string::npos ? std::string::npos : bar - start));
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return out;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  return out;
}

struct Options {
  std::string triples;
  std::vector<std::string> tuples;
  QueryRequest request;
  bool json = false;
  std::string dump_mqg;
  std::string dump_neighborhood;
  std::string trace_lattice;
  std::string suite;
  std::string report;
  std::string host = "0.0.0.0";
  int port = 8080;
};

void add_triples(CLI::App* cmd, Options& o) {
  cmd->add_option("--triples", o.triples, "Tab-separated triple file")->envname("GQBE_TRIPLES")->required();
}

void add_query_params(CLI::App* cmd, Options& o) {
  cmd->add_option("--kprime", o.request.k_prime, "Tuples kept before re-ranking")->capture_default_str();
  cmd->add_option("--d", o.request.d, "Neighborhood path length")->capture_default_str();
  cmd->add_option("--r", o.request.r, "Target MQG size")->capture_default_str();
}

int do_load(const Options& o, std::ostream& out) {
  auto g = DataGraph::load_file(o.triples);
  out << "entities\t" << g.entity_count() << "\nlabels\t" << g.label_count() << "\nedges\t" << g.edge_count()
      << '\n';
  return 0;
}

int do_query(Options& o, std::ostream& out) {
  auto g = DataGraph::load_file(o.triples);
  for (const auto& t : o.tuples) o.request.tuples.push_back(split_tuple(t));

  std::optional<std::ofstream> mqg_out, nbr_out, trace_out;
  QueryDiagnostics diag;
  if (!o.dump_mqg.empty()) diag.mqg = &mqg_out.emplace(open_output(o.dump_mqg));
  if (!o.dump_neighborhood.empty()) diag.neighborhood = &nbr_out.emplace(open_output(o.dump_neighborhood));
  if (!o.trace_lattice.empty()) diag.lattice_trace = &trace_out.emplace(open_output(o.trace_lattice));

  auto resp = run_query(g, o.request, diag);
  if (o.json) {
    out << answers_json(resp.answers) << '\n';
    return 0;
  }
  out << "rank\tscore\tanswer\n";
  for (const auto& a : resp.answers) {
    out << a.rank << '\t' << format_weight(a.score) << '\t';
    for (std::size_t i = 0; i < a.entities.size(); ++i) out << (i ? " | " : "") << a.entities[i];
    out << '\n';
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "# evaluated %zu, pruned %zu, %.3f ms\n", resp.stats.nodes_evaluated,
                resp.stats.nodes_pruned, resp.stats.millis);
  out << buf;
  return 0;
}

int do_eval(const Options& o, std::ostream& out) {
  auto g = DataGraph::load_file(o.triples);
  std::ifstream in(o.suite);
  if (!in) throw InvalidArgument("cannot open " + o.suite);
  auto cases = parse_suite(in);
  auto rows = run_suite(g, cases, {o.request.k_prime, o.request.d, o.request.r});
  if (o.report.empty()) {
    write_report(out, rows);
  } else {
    auto file = open_output(o.report);
    write_report(file, rows);
  }
  return 0;
}

int do_serve(const Options& o, std::ostream& out, std::ostream& err) {
  auto g = DataGraph::load_file(o.triples);
  Service service(g);
  out << "listening on " << o.host << ':' << o.port << std::endl;
  if (!service.listen(o.host, o.port)) {
    err << "cannot listen on " << o.host << ':' << o.port << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Query-by-example search over knowledge graphs", "gqbe"};
  app.require_subcommand(1);
  Options o;

  auto* load = app.add_subcommand("load", "Load a triple file and print its size");
  add_triples(load, o);

  auto* query = app.add_subcommand("query", "Find tuples similar to the example tuples");
  add_triples(query, o);
  query->add_option("--tuple", o.tuples, "Example tuple, entities separated by '|' (repeatable)")->required();
  query->add_option("--k", o.request.k, "Answers to return")->capture_default_str();
  add_query_params(query, o);
  query->add_flag("--json", o.json, "Print answers as JSON");
  query->add_option("--dump-mqg", o.dump_mqg, "Write the maximal query graph here");
  query->add_option("--dump-neighborhood", o.dump_neighborhood, "Write the reduced neighborhood here");
  query->add_option("--trace-lattice", o.trace_lattice, "Write lattice exploration events here");

  auto* eval = app.add_subcommand("eval", "Score a query suite against its ground truth");
  add_triples(eval, o);
  eval->add_option("--suite", o.suite, "JSON-lines suite file")->required();
  eval->add_option("--report", o.report, "CSV report path (stdout when omitted)");
  add_query_params(eval, o);

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  add_triples(serve, o);
  serve->add_option("--port", o.port, "Listen port")->capture_default_str();
  serve->add_option("--host", o.host, "Listen address")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (load->parsed()) return do_load(o, out);
    if (query->parsed()) return do_query(o, out);
    if (eval->parsed()) return do_eval(o, out);
    return do_serve(o, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace gqbe
