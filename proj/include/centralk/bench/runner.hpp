#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "centralk/bench/bipartition.hpp"
#include "centralk/bench/graph.hpp"
#include "centralk/bench/sssp.hpp"
#include "centralk/ordering.hpp"
#include "centralk/stress.hpp"

namespace centralk::bench {

struct BenchConfig {
  std::string bench = "sssp";  // sssp | gp | stress
  std::size_t size = 1000;
  double p = 0.01;
  std::uint64_t max_w = 100000000;
  std::size_t k = 1024;
  std::vector<unsigned> threads = {1, 2, 4, 8};
  unsigned seeds = 5;  // runs seeds 0 .. seeds-1
  std::size_t block_size = 128;
  std::size_t tests = 0;
  std::string ordering = "relaxed";   // relaxed | strict | both
  std::string handshake = "acquire";  // acquire | fence
  std::string csv_path;               // empty = stdout
  bool verify = false;

  void validate() const {
    if (bench != "sssp" && bench != "gp" && bench != "stress")
      throw std::invalid_argument("bench must be sssp, gp or stress");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must be in [0, 1]");
    if (size < 1) throw std::invalid_argument("size must be >= 1");
    if (seeds < 1) throw std::invalid_argument("seeds must be >= 1");
    if (threads.empty()) throw std::invalid_argument("threads list is empty");
    for (unsigned t : threads)
      if (t < 1) throw std::invalid_argument("thread counts must be >= 1");
    if (ordering != "relaxed" && ordering != "strict" && ordering != "both")
      throw std::invalid_argument("ordering must be relaxed, strict or both");
    if (handshake != "acquire" && handshake != "fence")
      throw std::invalid_argument("handshake must be acquire or fence");
    if (verify && bench == "gp" && size > 20)
      throw std::invalid_argument("gp verification needs size <= 20");
  }

  Config storage_config(std::uint64_t seed) const {
    Config cfg;
    cfg.block_size = block_size;
    cfg.tests = tests;
    cfg.handshake =
        handshake == "fence" ? Handshake::fence : Handshake::acquire_load;
    cfg.seed = seed;
    return cfg;
  }
};

struct BenchRow {
  std::string bench;
  std::string mode;
  std::string handshake;
  unsigned threads = 0;
  std::uint64_t seed = 0;
  double runtime_s = 0.0;
  std::uint64_t tasks_executed = 0;
  std::uint64_t heap_discards = 0;
  std::uint64_t blocks_linked = 0;
  std::uint64_t blocks_reused = 0;
};

inline constexpr const char* kCsvHeader =
    "bench,mode,handshake,threads,seed,runtime_s,tasks_executed,"
    "heap_discards,blocks_linked,blocks_reused";
inline constexpr const char* kSummaryHeader =
    "bench,mode,threads,mean_runtime_s,sd_runtime_s";

inline void write_row(std::ostream& os, const BenchRow& r) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", r.runtime_s);
  os << r.bench << ',' << r.mode << ',' << r.handshake << ',' << r.threads
     << ',' << r.seed << ',' << buf << ',' << r.tasks_executed << ','
     << r.heap_discards << ',' << r.blocks_linked << ',' << r.blocks_reused
     << '\n';
}

/// Mean and sample standard deviation per (bench, mode, threads) group, in
/// first-seen group order.
inline std::string summarize(const std::vector<BenchRow>& rows) {
  std::vector<std::tuple<std::string, std::string, unsigned>> order;
  std::map<std::tuple<std::string, std::string, unsigned>, std::vector<double>>
      groups;
  for (const auto& r : rows) {
    auto key = std::make_tuple(r.bench, r.mode, r.threads);
    if (!groups.contains(key)) order.push_back(key);
    groups[key].push_back(r.runtime_s);
  }
  std::ostringstream os;
  os << kSummaryHeader << '\n';
  for (const auto& key : order) {
    const auto& xs = groups[key];
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double sd = 0.0;
    if (xs.size() > 1) {
      for (double x : xs) sd += (x - mean) * (x - mean);
      sd = std::sqrt(sd / static_cast<double>(xs.size() - 1));
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f", mean, sd);
    os << std::get<0>(key) << ',' << std::get<1>(key) << ','
       << std::get<2>(key) << ',' << buf << '\n';
  }
  return os.str();
}

namespace detail {

template <typename O>
int run_one(const BenchConfig& bc, unsigned threads, std::uint64_t seed,
            std::vector<BenchRow>& rows) {
  BenchRow row;
  row.bench = bc.bench;
  row.mode = O::name;
  row.handshake = bc.handshake;
  row.threads = threads;
  row.seed = seed;

  const Config cfg = bc.storage_config(seed);
  int rc = 0;
  if (bc.bench == "sssp") {
    const BenchGraph g = gen_graph(bc.size, bc.p, bc.max_w, seed);
    RunStats stats;
    const auto dist = sssp_parallel<O>(g, 0, bc.k, threads, cfg, &stats);
    row.runtime_s = stats.wall_seconds;
    row.tasks_executed = stats.tasks_executed;
    const auto totals = stats.totals();
    row.heap_discards = totals.heap_discards;
    row.blocks_linked = totals.blocks_linked;
    row.blocks_reused = totals.blocks_reused;
    if (bc.verify && dist != sssp_seq(g, 0)) {
      std::cerr << "verify FAILED: sssp mismatch (seed " << seed << ", "
                << threads << " threads, " << O::name << ")\n";
      rc = 1;
    }
  } else if (bc.bench == "gp") {
    const BenchGraph g = gen_graph(bc.size, bc.p, bc.max_w, seed);
    RunStats stats;
    const std::uint64_t cut = gp_parallel<O>(g, threads, bc.k, cfg, &stats);
    row.runtime_s = stats.wall_seconds;
    row.tasks_executed = stats.tasks_executed;
    const auto totals = stats.totals();
    row.heap_discards = totals.heap_discards;
    row.blocks_linked = totals.blocks_linked;
    row.blocks_reused = totals.blocks_reused;
    if (bc.verify && cut != gp_seq(g)) {
      std::cerr << "verify FAILED: gp mismatch (seed " << seed << ", "
                << threads << " threads, " << O::name << ")\n";
      rc = 1;
    }
  } else {  // stress
    StressParams sp;
    sp.threads = threads;
    sp.items_per_thread = bc.size;
    sp.k = bc.k;
    sp.config = cfg;
    const StressReport report = run_stress<O>(sp);
    row.runtime_s = report.wall_seconds;
    row.tasks_executed = report.items_popped;
    row.heap_discards = report.totals.heap_discards;
    row.blocks_linked = report.totals.blocks_linked;
    row.blocks_reused = report.totals.blocks_reused;
    if (!report.pass()) {
      std::cerr << "stress audit FAILED (seed " << seed << ", " << threads
                << " threads, " << O::name << "): " << report.summary()
                << '\n';
      rc = 1;
    }
  }
  rows.push_back(row);
  return rc;
}

inline std::string summary_path(const std::string& csv_path) {
  const auto dot = csv_path.rfind('.');
  const auto slash = csv_path.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return csv_path + ".summary";
  return csv_path.substr(0, dot) + ".summary" + csv_path.substr(dot);
}

}  // namespace detail

/// Runs the configured (mode x threads x seed) matrix, writes one CSV row per
/// run plus a mean/sd summary per (bench, mode, threads), and returns nonzero
/// if any oracle verification or stress audit failed.
inline int run_benchmark(const BenchConfig& bc) {
  bc.validate();
  std::vector<BenchRow> rows;
  int rc = 0;

  std::vector<std::string> modes;
  if (bc.ordering == "both") {
    modes = {"relaxed", "strict"};
  } else {
    modes = {bc.ordering};
  }
  for (const auto& mode : modes) {
    for (unsigned threads : bc.threads) {
      for (std::uint64_t seed = 0; seed < bc.seeds; ++seed) {
        if (mode == "relaxed") {
          rc |= detail::run_one<RelaxedOrdering>(bc, threads, seed, rows);
        } else {
          rc |= detail::run_one<StrictOrdering>(bc, threads, seed, rows);
        }
      }
    }
  }

  const std::string summary = summarize(rows);
  if (bc.csv_path.empty()) {
    std::cout << kCsvHeader << '\n';
    for (const auto& r : rows) write_row(std::cout, r);
    std::cout << summary;
  } else {
    std::ofstream csv(bc.csv_path);
    if (!csv) throw std::runtime_error("cannot open " + bc.csv_path);
    csv << kCsvHeader << '\n';
    for (const auto& r : rows) write_row(csv, r);
    const std::string spath = detail::summary_path(bc.csv_path);
    std::ofstream sfile(spath);
    if (!sfile) throw std::runtime_error("cannot open " + spath);
    sfile << summary;
    std::cout << "wrote " << rows.size() << " rows to " << bc.csv_path
              << ", summary to " << spath << '\n';
  }
  return rc;
}

}  // namespace centralk::bench
