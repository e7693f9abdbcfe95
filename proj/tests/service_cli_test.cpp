#include <doctest.h>

#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "fixtures.hpp"
#include "gqbe/cli.hpp"
#include "gqbe/engine.hpp"
#include "gqbe/service.hpp"

using namespace gqbe;
using nlohmann::json;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gqbe");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("gqbe_test_" + name);
}

}  // namespace

TEST_CASE("health and autocomplete handlers") {
  auto g = fixtures::load("founders.tsv");
  Service svc(g);

  auto health = svc.handle_health();
  CHECK(health.status == 200);
  CHECK(json::parse(health.body) == json{{"status", "ok"}, {"entities", 21}, {"edges", 30}});

  auto ac = svc.handle_autocomplete("Jer", "10");
  CHECK(ac.status == 200);
  CHECK(json::parse(ac.body) == json::array({{{"id", g.entity("Jerry Yang").value}, {"name", "Jerry Yang"}}}));
  CHECK(json::parse(svc.handle_autocomplete("s", "2").body).size() == 2);
  CHECK(json::parse(svc.handle_autocomplete("zzz", "2").body).empty());
  CHECK(svc.handle_autocomplete("s", "0").status == 400);
  CHECK(svc.handle_autocomplete("s", "ten").status == 400);
  CHECK(svc.handle_autocomplete("s", "3x").status == 400);
}

TEST_CASE("query handler responses and errors") {
  auto g = fixtures::load("founders.tsv");
  Service svc(g);

  auto ok = svc.handle_query(R"({"tuples": [["Jerry Yang", "Yahoo!"]], "k": 5})");
  REQUIRE(ok.status == 200);
  auto resp = json::parse(ok.body).get<QueryResponse>();
  CHECK(resp.answers.size() == 5);
  CHECK(resp.answers.front().rank == 1);
  CHECK(resp.mqg.size() == 10);
  CHECK(resp.stats.nodes_evaluated > 0);
  for (const auto& a : resp.answers) CHECK(a.entities != std::vector<std::string>{"Jerry Yang", "Yahoo!"});

  auto missing = svc.handle_query(R"({"tuples": [["Jerry Yang", "Nobody", "Ghost"]]})");
  CHECK(missing.status == 404);
  CHECK(json::parse(missing.body).at("names") == json::array({"Nobody", "Ghost"}));

  CHECK(svc.handle_query(R"({"tuples": [["Jerry Yang", "Washington"]]})").status == 422);
  CHECK(svc.handle_query("{not json").status == 400);
  CHECK(svc.handle_query(R"({"tuples": "Jerry"})").status == 400);
  CHECK(svc.handle_query(R"({"tuples": []})").status == 400);
  CHECK(svc.handle_query(R"({"tuples": [["Jerry Yang", "Yahoo!"]], "k": 5, "k_prime": 2})").status == 400);
  CHECK(svc.handle_query(R"({"tuples": [["Jerry Yang", "Yahoo!"], ["Bill Gates"]]})").status == 400);
  CHECK(svc.handle_query(R"({"tuples": [["Jerry Yang", "Yahoo!"]], "r": 40})").status == 400);
}

TEST_CASE("request and response JSON round trip") {
  QueryRequest req{{{"a", "b"}}, 3, 30, 1, 9};
  CHECK(json(req).get<QueryRequest>() == req);
  auto partial = json::parse(R"({"tuples": [["a"]]})").get<QueryRequest>();
  CHECK(partial.k == 10);
  CHECK(partial.k_prime == 100);
  CHECK(partial.d == 2);
  CHECK(partial.r == 15);
  QueryResponse resp{{{{"x", "y"}, 1.5, 1}}, {{0, "w1", "founded", "w2", 2.0, 0}}, {4, 2, 0.5}};
  CHECK(json(resp).get<QueryResponse>() == resp);
}

TEST_CASE("HTTP server over a real socket") {
  auto g = fixtures::load("founders.tsv");
  Service svc(g);
  const int port = svc.bind_any("127.0.0.1");
  REQUIRE(port > 0);
  std::thread server([&] { svc.listen_after_bind(); });
  svc.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/api/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(health->get_header_value("Content-Type") == "application/json");

  auto ac = client.Get("/api/autocomplete?q=jer");
  REQUIRE(ac);
  CHECK(json::parse(ac->body).at(0).at("name") == "Jerry Yang");
  auto bad = client.Get("/api/autocomplete?q=j&limit=-1");
  REQUIRE(bad);
  CHECK(bad->status == 400);

  auto q = client.Post("/api/query", R"({"tuples": [["Jerry Yang", "Yahoo!"]]})", "application/json");
  REQUIRE(q);
  CHECK(q->status == 200);
  CHECK(json::parse(q->body).at("answers").size() == 10);
  auto nf = client.Post("/api/query", R"({"tuples": [["Nobody", "Yahoo!"]]})", "application/json");
  REQUIRE(nf);
  CHECK(nf->status == 404);

  svc.stop();
  server.join();
}

TEST_CASE("CLI load and usage errors") {
  const auto data = fixtures::data_path("founders.tsv");
  auto load = cli({"load", "--triples", data});
  CHECK(load.code == 0);
  CHECK(load.out == "entities\t21\nlabels\t6\nedges\t30\n");

  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({}).code == 2);
  auto no_tuple = cli({"query", "--triples", data});
  CHECK(no_tuple.code == 2);
  CHECK(no_tuple.err.find("--tuple") != std::string::npos);
  CHECK(cli({"query", "--triples", data, "--tuple", "Jerry Yang|Yahoo!", "--k", "abc"}).code == 2);
  CHECK(cli({"load", "--triples", "/nonexistent.tsv"}).code == 1);
  auto unknown = cli({"query", "--triples", data, "--tuple", "Jerry Yang|Nobody"});
  CHECK(unknown.code == 1);
  CHECK(unknown.err.find("Nobody") != std::string::npos);
}

TEST_CASE("CLI query output agrees with the service") {
  const auto data = fixtures::data_path("founders.tsv");
  auto g = fixtures::load("founders.tsv");
  Service svc(g);

  auto text = cli({"query", "--triples", data, "--tuple", "Jerry Yang|Yahoo!", "--k", "3"});
  REQUIRE(text.code == 0);
  std::istringstream lines(text.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "rank\tscore\tanswer");
  std::getline(lines, line);
  CHECK(line.rfind("1\t", 0) == 0);

  auto as_json = cli({"query", "--triples", data, "--tuple", "Jerry Yang|Yahoo!", "--json"});
  REQUIRE(as_json.code == 0);
  auto served = json::parse(svc.handle_query(R"({"tuples": [["Jerry Yang", "Yahoo!"]]})").body);
  CHECK(as_json.out == served.at("answers").dump() + "\n");
}

TEST_CASE("two-tuple MQG dump matches the service payload") {
  const auto data = fixtures::data_path("founders.tsv");
  auto g = fixtures::load("founders.tsv");
  Service svc(g);
  const auto dump = scratch("mqg.tsv");
  const auto nbr = scratch("nbr.tsv");
  const auto trace = scratch("trace.txt");
  auto run = cli({"query", "--triples", data, "--tuple", "Jerry Yang|Yahoo!", "--tuple", "Steve Wozniak|Apple Inc.",
                  "--dump-mqg", dump.string(), "--dump-neighborhood", nbr.string(), "--trace-lattice",
                  trace.string()});
  REQUIRE(run.code == 0);

  auto served = json::parse(
                    svc.handle_query(R"({"tuples": [["Jerry Yang", "Yahoo!"], ["Steve Wozniak", "Apple Inc."]]})").body)
                    .get<QueryResponse>();
  std::string rows;
  for (const auto& e : served.mqg) {
    rows += std::to_string(e.index) + "\t" + e.subj + "\t" + e.label + "\t" + e.obj + "\t" + format_weight(e.weight) +
            "\t" + std::to_string(e.depth) + "\n";
  }
  CHECK(slurp(dump) == rows);
  CHECK(rows.find("w1\tfounded\tw2") != std::string::npos);
  CHECK(slurp(nbr).find("# dist Steve Wozniak 0") != std::string::npos);
  CHECK(slurp(trace).rfind("UFADD ", 0) == 0);
  for (const auto& p : {dump, nbr, trace}) std::filesystem::remove(p);
}

TEST_CASE("CLI eval writes a CSV report") {
  const auto data = fixtures::data_path("founders.tsv");
  const auto suite = scratch("suite.jsonl");
  const auto report = scratch("report.csv");
  {
    std::ofstream out(suite);
    out << R"({"query": [["Jerry Yang", "Yahoo!"]], "truth": [["Steve Wozniak", "Apple Inc."], ["Sergey Brin", "Google"]], "k": 10})"
        << "\n";
  }
  auto to_stdout = cli({"eval", "--triples", data, "--suite", suite.string()});
  CHECK(to_stdout.code == 0);
  CHECK(to_stdout.out.rfind("query_id,P@k,AvgP,nDCG,nodes_evaluated,millis\n1,0.200000,", 0) == 0);
  CHECK(cli({"eval", "--triples", data, "--suite", suite.string(), "--report", report.string()}).code == 0);
  CHECK(slurp(report).rfind("query_id,", 0) == 0);
  CHECK(cli({"eval", "--triples", data, "--suite", "/nonexistent.jsonl"}).code == 1);
  std::filesystem::remove(suite);
  std::filesystem::remove(report);
}
