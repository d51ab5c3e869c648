#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "permledger/netsim.hpp"

namespace permledger {

/// sd is the population standard deviation (divide by n).
struct Stats {
  std::size_t n = 0;
  double min = 0;
  double max = 0;
  double avg = 0;
  double sd = 0;
};

/// Throws Error(EmptySamples).
Stats compute_stats(std::span<const double> samples);

/// Fixed two decimals, e.g. "122.57".
std::string format_2dp(double v);

struct LatencyReport {
  std::string scenario;
  Stats stats;
  std::vector<double> samples;

  static LatencyReport from_samples(std::string scenario, std::vector<double> samples);

  std::string to_json() const;
  /// Header: scenario,N,Min,Max,Avg.,SD
  std::string to_csv() const;
};

struct MemoryObservation {
  std::size_t observation = 0;
  std::size_t initial_bytes = 0;  // node stopped
  std::size_t post_start_bytes = 0;  // block index + chain state after restart
  std::size_t delta_bytes = 0;
  std::size_t per_block_bytes = 0;
  std::size_t block_count = 0;
};

struct MemoryReport {
  std::vector<MemoryObservation> rows;

  std::string to_json() const;
  /// Header: observation,initial_bytes,post_start_bytes,delta_bytes,per_block_bytes,block_count
  std::string to_csv() const;
};

/// Latency table layout: Scenarios, N, Min, Max, Avg., SD.
std::string render_latency_table(std::span<const LatencyReport> reports);

struct BenchResult {
  LatencyReport latency;
  MemoryReport memory;
  std::vector<std::filesystem::path> files;
};

/// Runs the scenario and writes <scenario>-latency.{json,csv} and
/// memory.{json,csv} into `out_dir` (created if missing). Throws Error(Config)
/// or Error(Io).
BenchResult run_bench(const ScenarioConfig& config, const std::filesystem::path& out_dir);

}  // namespace permledger
