#include "permledger/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "permledger/error.hpp"

namespace permledger {

using nlohmann::ordered_json;

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

}  // namespace

Stats compute_stats(std::span<const double> samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptySamples, "statistics need at least one sample");
  Stats s;
  s.min = samples.front();
  s.max = samples.front();
  // Welford's update keeps the variance accurate for large offsets.
  double mean = 0;
  double m2 = 0;
  for (double x : samples) {
    ++s.n;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
    const double d = x - mean;
    mean += d / static_cast<double>(s.n);
    m2 += d * (x - mean);
  }
  s.avg = std::clamp(mean, s.min, s.max);
  s.sd = std::sqrt(std::max(0.0, m2 / static_cast<double>(s.n)));
  return s;
}

std::string format_2dp(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string out = buf;
  if (out == "-0.00") out = "0.00";
  return out;
}

LatencyReport LatencyReport::from_samples(std::string scenario, std::vector<double> samples) {
  LatencyReport r;
  r.scenario = std::move(scenario);
  r.stats = compute_stats(samples);
  r.samples = std::move(samples);
  return r;
}

std::string LatencyReport::to_json() const {
  ordered_json j;
  j["scenario"] = scenario;
  j["n"] = stats.n;
  j["min_ms"] = stats.min;
  j["max_ms"] = stats.max;
  j["avg_ms"] = stats.avg;
  j["sd_ms"] = stats.sd;
  j["sd_convention"] = "population";
  j["row"] = {{"N", std::to_string(stats.n)},
              {"Min", format_2dp(stats.min)},
              {"Max", format_2dp(stats.max)},
              {"Avg.", format_2dp(stats.avg)},
              {"SD", format_2dp(stats.sd)}};
  j["samples"] = samples;
  return j.dump(2) + "\n";
}

std::string LatencyReport::to_csv() const {
  return "scenario,N,Min,Max,Avg.,SD\n" + scenario + "," + std::to_string(stats.n) + "," + format_2dp(stats.min) +
         "," + format_2dp(stats.max) + "," + format_2dp(stats.avg) + "," + format_2dp(stats.sd) + "\n";
}

std::string MemoryReport::to_json() const {
  ordered_json rows_json = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json j;
    j["observation"] = r.observation;
    j["initial_bytes"] = r.initial_bytes;
    j["post_start_bytes"] = r.post_start_bytes;
    j["delta_bytes"] = r.delta_bytes;
    j["per_block_bytes"] = r.per_block_bytes;
    j["block_count"] = r.block_count;
    rows_json.push_back(std::move(j));
  }
  ordered_json root;
  root["accounting"] = "block index + chain state";
  root["rows"] = std::move(rows_json);
  return root.dump(2) + "\n";
}

std::string MemoryReport::to_csv() const {
  std::string out = "observation,initial_bytes,post_start_bytes,delta_bytes,per_block_bytes,block_count\n";
  for (const auto& r : rows) {
    out += std::to_string(r.observation) + "," + std::to_string(r.initial_bytes) + "," +
           std::to_string(r.post_start_bytes) + "," + std::to_string(r.delta_bytes) + "," +
           std::to_string(r.per_block_bytes) + "," + std::to_string(r.block_count) + "\n";
  }
  return out;
}

std::string render_latency_table(std::span<const LatencyReport> reports) {
  std::vector<std::vector<std::string>> cells = {{"Scenarios", "N", "Min", "Max", "Avg.", "SD"}};
  for (const auto& r : reports) {
    cells.push_back({r.scenario, std::to_string(r.stats.n), format_2dp(r.stats.min), format_2dp(r.stats.max),
                     format_2dp(r.stats.avg), format_2dp(r.stats.sd)});
  }
  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += "  ";
      out += c == 0 ? row[c] + std::string(width[c] - row[c].size(), ' ')
                    : std::string(width[c] - row[c].size(), ' ') + row[c];
    }
    out += "\n";
  }
  return out;
}

BenchResult run_bench(const ScenarioConfig& config, const std::filesystem::path& out_dir) {
  auto scenario = run_scenario(config);
  BenchResult result;
  result.latency = LatencyReport::from_samples(config.scenario, scenario.samples);
  for (std::size_t i = 0; i < scenario.cycles.size(); ++i) {
    const auto& c = scenario.cycles[i];
    MemoryObservation row;
    row.observation = i + 1;
    row.initial_bytes = 0;
    row.post_start_bytes = c.memory_bytes;
    row.delta_bytes = row.post_start_bytes - row.initial_bytes;
    row.per_block_bytes = BlockIndex::kEntryBytes;
    row.block_count = c.block_count;
    result.memory.rows.push_back(row);
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir.string() + ": " + ec.message());
  const auto stem = config.scenario + "-latency";
  std::vector<std::pair<std::filesystem::path, std::string>> outputs = {
      {out_dir / (stem + ".json"), result.latency.to_json()},
      {out_dir / (stem + ".csv"), result.latency.to_csv()},
      {out_dir / "memory.json", result.memory.to_json()},
      {out_dir / "memory.csv", result.memory.to_csv()},
  };
  for (const auto& [path, content] : outputs) {
    write_file(path, content);
    result.files.push_back(path);
  }
  return result;
}

}  // namespace permledger
