#include "doctest.h"

#include "json.hpp"

#include "permledger/bench.hpp"
#include "support.hpp"

using namespace permledger;
using testsupport::Gen;

TEST_CASE("stats of known sets") {
  auto s = compute_stats(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9});
  CHECK(s.n == 8);
  CHECK(s.min == 2);
  CHECK(s.max == 9);
  CHECK(s.avg == 5);
  CHECK(s.sd == 2);
  auto one = compute_stats(std::vector<double>{42.5});
  CHECK(one.min == 42.5);
  CHECK(one.max == 42.5);
  CHECK(one.avg == 42.5);
  CHECK(one.sd == 0);
  CHECK(compute_stats(std::vector<double>(20, 122.57)).sd == 0);
  try {
    compute_stats(std::vector<double>{});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptySamples);
  }
}

TEST_CASE("stats stay ordered and agree with a two-pass oracle") {
  Gen gen(81);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> xs(20);
    for (auto& x : xs) x = gen.real(80, 170);
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= 20;
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    auto s = compute_stats(xs);
    CHECK(s.avg == doctest::Approx(mean).epsilon(1e-12));
    CHECK(s.sd == doctest::Approx(std::sqrt(ss / 20)).epsilon(1e-12));
    CHECK(s.min <= s.avg);
    CHECK(s.avg <= s.max);
  }
}

TEST_CASE("two decimal formatting") {
  CHECK(format_2dp(122.574) == "122.57");
  CHECK(format_2dp(19.315) == "19.32");
  CHECK(format_2dp(85) == "85.00");
  CHECK(format_2dp(-0.001) == "0.00");
}

TEST_CASE("table rows follow the published column order") {
  std::vector<LatencyReport> reports = {LatencyReport::from_samples("S1", {85, 159.5, 120}),
                                        LatencyReport::from_samples("S2", {80, 100})};
  auto table = render_latency_table(reports);
  auto header_end = table.find('\n');
  auto header = table.substr(0, header_end);
  const std::vector<std::string> cols = {"Scenarios", "N", "Min", "Max", "Avg.", "SD"};
  std::size_t at = 0;
  for (const auto& col : cols) {
    auto pos = header.find(col, at);
    REQUIRE(pos != std::string::npos);
    at = pos + col.size();
  }
  CHECK(table.find("159.50") != std::string::npos);
  CHECK(table.find("S2") != std::string::npos);
}

TEST_CASE("latency and memory reports render fixed headers") {
  auto r = LatencyReport::from_samples("S1", {100, 110});
  CHECK(r.to_csv() == "scenario,N,Min,Max,Avg.,SD\nS1,2,100.00,110.00,105.00,5.00\n");
  auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["sd_convention"] == "population");
  CHECK(j["samples"].size() == 2);
  MemoryReport m;
  m.rows.push_back({1, 0, 500, 500, 64, 3});
  CHECK(m.to_csv() ==
        "observation,initial_bytes,post_start_bytes,delta_bytes,per_block_bytes,block_count\n1,0,500,500,64,3\n");
}

TEST_CASE("bench writes byte-identical reports for identical configs") {
  testsupport::TempDir dir("bench");
  auto c = ScenarioConfig::for_scenario("S1");
  c.observations = 6;
  auto first = run_bench(c, dir.path() / "a");
  auto second = run_bench(c, dir.path() / "b");
  REQUIRE(first.files.size() == 4);
  for (const char* f : {"S1-latency.json", "S1-latency.csv", "memory.json", "memory.csv"}) {
    auto a = testsupport::read_file(dir.path() / "a" / f);
    CHECK_FALSE(a.empty());
    CHECK(a == testsupport::read_file(dir.path() / "b" / f));
  }
  CHECK(first.latency.samples.size() == 6);
  for (const auto& row : first.memory.rows) {
    CHECK(row.delta_bytes == row.post_start_bytes - row.initial_bytes);
    CHECK(row.per_block_bytes == 64);
  }
  CHECK(first.memory.rows.back().block_count == 8);
  c.nodes = 5;
  CHECK_THROWS_AS(run_bench(c, dir.path() / "c"), Error);
}
