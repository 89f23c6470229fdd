// Serial vs OpenMP timings for the parallel kernels. Each pair is also
// checked for identical output.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "CLI11.hpp"
#include "adslate/factorized.hpp"
#include "adslate/gpds.hpp"
#include "adslate/harness.hpp"
#include "adslate/oracle.hpp"
#include "adslate/ptas.hpp"

using namespace adslate;

namespace {

template <class F>
double best_ms(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

int failures = 0;

template <class R>
void row(const char* name, int reps, const std::function<R()>& serial, const std::function<R()>& parallel) {
  R a{}, b{};
  const double ts = best_ms(reps, [&] { a = serial(); });
  const double tp = best_ms(reps, [&] { b = parallel(); });
  const bool same = a == b;
  failures += !same;
  std::printf("%-24s %10.2f %10.2f %8.2fx  %s\n", name, ts, tp, tp > 0 ? ts / tp : 0.0, same ? "identical" : "DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs parallel kernel timings"};
  int reps = 3, threads = 0;
  std::uint64_t seed = default_seed(7);
  app.add_option("--reps", reps, "Repetitions; the best time is kept")->capture_default_str();
  app.add_option("--threads", threads, "OpenMP threads (0 keeps the runtime default)");
  app.add_option("--seed", seed)->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-24s %10s %10s %9s\n", "kernel", "serial ms", "omp ms", "speedup");

  Rng rng = make_stream(seed, 0);
  const Instance alloc_inst = gen_nn_instance(8, 16, gen_random_metric(16, rng), rng);
  row<double>("optimal_allocation", reps, [&] { return optimal_allocation_serial(alloc_inst).value; },
              [&] { return optimal_allocation(alloc_inst).value; });

  const Instance lp_inst = gen_nn_instance(4, 6, gen_random_metric(6, rng), rng);
  const NnLpAllocator lp(lp_inst);
  row<std::vector<double>>("inclusion_frequencies", reps,
                           [&] { return inclusion_frequencies_serial(lp.plan(), 200'000, seed); },
                           [&] { return inclusion_frequencies(lp.plan(), 200'000, seed); });
  row<double>("mean_welfare", reps, [&] { return lp.mean_welfare_serial(100'000, seed, ConversionMode::Virtual); },
              [&] { return lp.mean_welfare(100'000, seed, ConversionMode::Virtual); });

  std::vector<ValueDistribution> dists;
  for (int i = 0; i < 8; ++i) dists.push_back(ValueDistribution::uniform(0.0, 1.0 + i));
  row<std::vector<double>>("gamma_order_stats", reps, [&] { return gamma_order_stats_serial(dists, 400'000, seed); },
                           [&] { return gamma_order_stats(dists, 400'000, seed); });

  const Graph graph = gen_graph(20, 0.3, rng);
  row<double>("optimal_msed", reps, [&] { return optimal_msed_serial(graph).value; },
              [&] { return optimal_msed(graph).value; });

  const auto layout = gen_euclidean(9, 1.0, rng);
  const Instance unit = gen_unit_instance(3, layout.metric, rng);
  PtasOptions serial_opt, par_opt;
  serial_opt.parallel = false;
  row<double>("ptas (eps 1/3)", reps, [&] { return ptas_allocate(unit, layout.points, 1.0 / 3, serial_opt).welfare; },
              [&] { return ptas_allocate(unit, layout.points, 1.0 / 3, par_opt).welfare; });

  return failures == 0 ? 0 : 1;
}
