// Benchmark and stress driver for the k-relaxed central task storage.
//
//   bench --bench {sssp|gp|stress} --size N --p F --max-w W --k K
//         --threads 1,2,4,8 --seeds S --block-size B --tests T
//         --ordering {relaxed|strict|both} --handshake {acquire|fence}
//         --csv PATH [--verify]
//
// Emits one CSV row per (mode, threads, seed) run and a mean/sd summary per
// (bench, mode, threads). Exit status is nonzero if a verification or stress
// audit fails.

#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "centralk/bench/runner.hpp"

int main(int argc, char** argv) {
  centralk::bench::BenchConfig bc;

  CLI::App app{"k-relaxed central task storage benchmarks"};
  app.add_option("--bench", bc.bench, "Benchmark: sssp, gp or stress")
      ->check(CLI::IsMember({"sssp", "gp", "stress"}));
  app.add_option("--size", bc.size,
                 "Graph node count (sssp/gp) or items per thread (stress)");
  app.add_option("--p", bc.p, "Edge probability")->check(CLI::Range(0.0, 1.0));
  app.add_option("--max-w", bc.max_w, "Maximum edge weight (uniform in [1, max_w])");
  app.add_option("--k", bc.k, "Relaxation bound per task");
  app.add_option("--threads", bc.threads, "Thread counts, comma separated")
      ->delimiter(',');
  app.add_option("--seeds", bc.seeds, "Number of seeds (runs 0..S-1)");
  app.add_option("--block-size", bc.block_size, "Slots per data block");
  app.add_option("--tests", bc.tests,
                 "Probe budget per put window (0 = block size)");
  app.add_option("--ordering", bc.ordering, "Memory ordering mode")
      ->check(CLI::IsMember({"relaxed", "strict", "both"}));
  app.add_option("--handshake", bc.handshake, "Block reuse handshake variant")
      ->check(CLI::IsMember({"acquire", "fence"}));
  app.add_option("--csv", bc.csv_path, "CSV output path (default: stdout)");
  app.add_flag("--verify", bc.verify,
               "Check results against the sequential oracle");

  CLI11_PARSE(app, argc, argv);

  try {
    return centralk::bench::run_benchmark(bc);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
