// Compares the serial reference implementations against the OpenMP kernels:
// corpus evaluation and per-instance trajectory sampling. Verifies that both
// paths produce identical results before reporting timings.

#include <chrono>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "entailrl/synthetic.hpp"
#include "entailrl/trainer.hpp"

using namespace entailrl;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

void print_row(const char* kernel, double serial_ms, double parallel_ms,
               bool match) {
  std::printf("%-22s %10.2f %12.2f %8.2fx   %s\n", kernel, serial_ms,
              parallel_ms, serial_ms / parallel_ms, match ? "ok" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs OpenMP benchmark"};
  int instances = 400;
  int trajectories = 256;
  int workers = 0;
  int reps = 3;
  app.add_option("--instances", instances);
  app.add_option("--trajectories", trajectories);
  app.add_option("--workers", workers, "0 = all cores");
  app.add_option("--reps", reps);
  CLI11_PARSE(app, argc, argv);

  std::vector<Instance> corpus = synthetic::separable_corpus(instances, 7);
  PolicyParams params = synthetic::oracle_params();

  std::printf("%-22s %10s %12s %9s   %s\n", "kernel", "serial_ms", "parallel_ms",
              "speedup", "check");

  // corpus evaluation
  EvalOptions opts;
  opts.workers = workers;
  EvalResult serial_eval = evaluate_serial(params, corpus, opts);
  EvalResult parallel_eval = evaluate(params, corpus, opts);
  bool eval_match = serial_eval.to_json() == parallel_eval.to_json();
  double eval_serial_ms =
      time_ms([&] { evaluate_serial(params, corpus, opts); }, reps);
  double eval_parallel_ms = time_ms([&] { evaluate(params, corpus, opts); }, reps);
  print_row("evaluate_corpus", eval_serial_ms, eval_parallel_ms, eval_match);

  // trajectory sampling
  RolloutConfig rollcfg;
  EntailmentTree gold_bin = binarize(corpus.front().gold_tree);
  auto serial_batch = sample_batch_serial(params, corpus.front(), gold_bin, 0.5,
                                          rollcfg, 99, trajectories);
  auto parallel_batch = sample_batch(params, corpus.front(), gold_bin, 0.5,
                                     rollcfg, 99, trajectories, workers);
  bool batch_match = serial_batch.size() == parallel_batch.size();
  for (std::size_t i = 0; batch_match && i < serial_batch.size(); ++i)
    batch_match = serial_batch[i].to_json() == parallel_batch[i].to_json();
  double batch_serial_ms = time_ms(
      [&] {
        sample_batch_serial(params, corpus.front(), gold_bin, 0.5, rollcfg, 99,
                            trajectories);
      },
      reps);
  double batch_parallel_ms = time_ms(
      [&] {
        sample_batch(params, corpus.front(), gold_bin, 0.5, rollcfg, 99,
                     trajectories, workers);
      },
      reps);
  print_row("sample_trajectories", batch_serial_ms, batch_parallel_ms, batch_match);

  return (eval_match && batch_match) ? 0 : 1;
}
