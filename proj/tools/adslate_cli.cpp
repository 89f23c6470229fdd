#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adslate/factorized.hpp"
#include "adslate/gpds.hpp"
#include "adslate/harness.hpp"
#include "adslate/io.hpp"
#include "adslate/mechanism.hpp"
#include "adslate/oracle.hpp"
#include "adslate/proddist.hpp"
#include "adslate/ptas.hpp"
#include "json.hpp"

using namespace adslate;

namespace {

std::string num(double v) { return csv_number(v); }

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    io::write_file(path, text);
}

std::string matching_text(const Matching& m) {
  std::string s;
  for (const auto& [i, j] : m.pairs) s += (s.empty() ? "" : " ") + std::to_string(i) + "->" + std::to_string(j);
  return s.empty() ? "(empty)" : s;
}

// ---- gen ----

struct GenArgs {
  std::string kind = "nn";
  std::string metric = "euclidean";
  int n = 3, m = 4;
  double p = 0.3;
  std::uint64_t seed = 1;
  std::string out, points_out;
};

void run_gen(const GenArgs& a) {
  Rng rng = make_stream(a.seed, 0);
  if (a.kind == "graph") {
    emit(io::graph_to_edge_list(gen_graph(a.n, a.p, rng)), a.out);
    return;
  }
  if (a.kind == "dists") {
    emit(io::distributions_to_json(gen_distributions(a.n, rng)), a.out);
    return;
  }
  Metric metric;
  std::vector<Point2> points;
  if (parse_metric_kind(a.metric) == MetricKind::Euclidean) {
    auto layout = gen_euclidean(a.m, 1.0, rng);
    metric = std::move(layout.metric);
    points = std::move(layout.points);
  } else {
    metric = gen_random_metric(a.m, rng);
  }
  std::string text;
  if (a.kind == "nn") {
    text = io::instance_to_json(gen_nn_instance(a.n, a.m, metric, rng));
  } else if (a.kind == "pd") {
    const Instance nn = gen_nn_instance(a.n, a.m, metric, rng);
    text = io::instance_to_json(Instance(a.n, a.m, nn.values(), metric, DiscountModel::ProductDistance));
  } else if (a.kind == "unit") {
    text = io::instance_to_json(gen_unit_instance(a.n, metric, rng));
  } else if (a.kind == "factorized") {
    text = io::factorized_to_json(gen_factorized(a.n, metric, rng));
  } else if (a.kind == "stochastic") {
    const auto f = gen_factorized(0, metric, rng);
    text = io::stochastic_to_json({f.u, gen_distributions(a.n, rng), metric});
  } else {
    throw CLI::ValidationError("--kind", "expected nn|pd|unit|factorized|stochastic|dists|graph");
  }
  emit(text, a.out);
  if (!a.points_out.empty()) {
    if (points.empty()) throw CLI::ValidationError("--points-out", "needs a euclidean metric");
    io::write_file(a.points_out, io::points_to_json(points));
  }
}

// ---- oracle ----

void run_oracle(const std::string& path, int cap) {
  const Instance inst = io::instance_from_json(io::read_file(path));
  OracleOptions opt;
  opt.max_points = cap;
  const auto r = optimal_allocation(inst, opt);
  std::cout << "model," << to_string(inst.model()) << "\n";
  std::cout << "opt," << num(r.value) << "\n";
  std::cout << "subsets_explored," << r.explored << "\n";
  std::cout << "matching," << matching_text(r.best) << "\n";
}

// ---- nn-lp ----

void run_nn_lp(const std::string& path, std::uint64_t seed, std::int64_t trials, const std::string& mode_name,
               int cap) {
  const Instance inst = io::instance_from_json(io::read_file(path));
  const auto mode = parse_conversion_mode(mode_name);
  const NnLpAllocator alloc(inst);
  std::cout << "trial,sw\n";
  double sum = 0.0, sq = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(t));
    const double sw = alloc.allocate(rng, mode).welfare;
    sum += sw;
    sq += sw * sw;
    std::cout << t << ',' << num(sw) << '\n';
  }
  const double n = static_cast<double>(trials);
  const double mean = sum / n;
  const double se = trials > 1 ? std::sqrt(std::max(0.0, (sq - n * mean * mean) / (n - 1.0)) / n) : 0.0;
  std::optional<double> opt;
  if (inst.m() <= cap) {
    OracleOptions o;
    o.max_points = cap;
    opt = optimal_allocation(inst, o).value;
  }
  std::cout << "\nmode,seed,trials,mean_sw,stderr,lp_objective,lp_over_18,opt\n";
  std::cout << to_string(mode) << ',' << seed << ',' << trials << ',' << num(mean) << ',' << num(se) << ','
            << num(alloc.lp_objective()) << ',' << num(alloc.lp_objective() / 18.0) << ','
            << (opt ? num(*opt) : "") << '\n';
}

// ---- factorized ----

void run_factorized(const std::string& path, const std::string& algo, const std::string& dists_path,
                     std::int64_t trials, std::uint64_t seed, std::int64_t gamma_samples) {
  const FactorizedInstance inst = io::factorized_from_json(io::read_file(path));
  std::cout << "trial,advertiser,bid,slot,quantity,payment\n";
  auto report = [&](std::int64_t t, const SlotSelection& sel, const std::vector<double>& w) {
    const auto a = greedy_assign(sel, w);
    std::vector<int> slot_of(w.size(), -1);
    for (const auto& [i, j] : a.matching.pairs) slot_of[i] = j;
    for (int i = 0; i < static_cast<int>(w.size()); ++i)
      std::cout << t << ',' << i << ',' << num(w[i]) << ',' << slot_of[i] << ',' << num(a.quantity[i]) << ','
                << num(factorized_payment(sel, w, i)) << '\n';
  };
  if (algo == "logm") {
    const int levels = logm_levels(inst.m()) + 1;
    for (std::int64_t t = 0; t < trials; ++t) {
      Rng rng = make_stream(seed, static_cast<std::uint64_t>(t));
      const int l = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(levels)));
      report(t, select_slots_radius(inst.u, inst.metric, logm_radius(l)), inst.w);
    }
    return;
  }
  if (algo != "stochastic") throw CLI::ValidationError("--algo", "expected logm|stochastic");
  if (dists_path.empty()) throw CLI::ValidationError("--dists", "required for the stochastic mechanism");
  StochasticInstance si{inst.u, io::distributions_from_json(io::read_file(dists_path)), inst.metric};
  const StochasticMechanism mech(si, gamma_samples, seed);
  for (std::int64_t t = 0; t < trials; ++t) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(t));
    const auto w = draw_values(si.dists, rng);
    report(t, mech.preselect(rng), w);
  }
}

// ---- ptas ----

void run_ptas(const std::string& points_path, const std::string& u_path, double eps, int n,
              std::int64_t work_cap) {
  const auto points = io::points_from_json(io::read_file(points_path));
  const auto u = io::doubles_from_json(io::read_file(u_path));
  if (u.size() != points.size()) throw CLI::ValidationError("--u", "one weight per point expected");
  const int adv = n > 0 ? n : static_cast<int>(u.size());
  std::vector<std::vector<double>> rows(adv, u);
  const Instance inst(rows, normalized_metric(points), DiscountModel::NearestNeighbor);
  PtasOptions opt;
  opt.work_cap = work_cap;
  const auto a = ptas_allocate(inst, points, eps, opt);
  std::string slots;
  for (const auto& [i, j] : a.matching.pairs) slots += (slots.empty() ? "" : " ") + std::to_string(j);
  std::cout << "k," << a.dp.k << "\n";
  std::cout << "slots," << slots << "\n";
  std::cout << "sw," << num(a.welfare) << "\n";
  std::cout << "disk_value," << num(a.dp.selection.value) << "\n";
  std::cout << "lone_slot_fallback," << (a.single_slot ? "yes" : "no") << "\n\n";
  std::cout << "alpha,beta,survivors,value,work,table_entries,max_boundary,max_local\n";
  for (const auto& o : a.dp.offsets)
    std::cout << o.alpha << ',' << o.beta << ',' << o.survivors << ',' << num(o.value) << ',' << o.work << ','
              << o.table_entries << ',' << o.max_boundary << ',' << o.max_local << '\n';
}

// ---- proddist ----

void run_proddist(const std::string& graph_path, const std::string& allocator) {
  const Graph g = io::graph_from_edge_list(io::read_file(graph_path));
  PdAllocator alloc;
  if (allocator == "oracle")
    alloc = oracle_pd_allocator();
  else if (allocator == "single-slot")
    alloc = single_slot_pd_allocator();
  else
    throw CLI::ValidationError("--allocator", "expected oracle|single-slot");
  const auto r = hardness_demo(g, alloc);
  auto join = [](const std::vector<int>& v) {
    std::string s;
    for (int x : v) s += (s.empty() ? "" : " ") + std::to_string(x);
    return s;
  };
  std::cout << "matching," << matching_text(r.matching) << "\n";
  std::cout << "welfare," << num(r.welfare) << "\n";
  std::cout << "subset," << join(r.subset) << "\n";
  std::cout << "objective," << num(r.objective) << "\n";
  std::cout << "independent," << join(r.refinement.independent) << "\n";
  std::cout << "independent_size," << r.independent_size << "\n";
  std::cout << "mis_size," << r.mis_size << "\n\n";
  std::cout << "step,removed,before,after\n";
  for (std::size_t k = 0; k < r.refinement.steps.size(); ++k) {
    const auto& s = r.refinement.steps[k];
    std::cout << k << ',' << s.removed << ',' << num(s.before) << ',' << num(s.after) << '\n';
  }
}

// ---- audit ----

struct AuditArgs {
  std::string rule = "logm";
  std::string instance, dists;
  int advertiser = 0;
  std::int64_t trials = 10'000;
  std::int64_t gamma_samples = 100'000;
  std::uint64_t seed = 1;
};

void run_audit(const AuditArgs& a) {
  const std::string text = io::read_file(a.instance);
  std::unique_ptr<SingleParameterRule> rule;
  if (a.rule == "lp") {
    rule = make_lp_rule(io::instance_from_json(text));
  } else if (a.rule == "single-slot") {
    rule = make_single_slot_rule(io::instance_from_json(text));
  } else if (a.rule == "logm") {
    rule = make_logm_rule(io::factorized_from_json(text));
  } else if (a.rule == "stochastic") {
    if (a.dists.empty()) throw CLI::ValidationError("--dists", "required for the stochastic rule");
    const auto f = io::factorized_from_json(text);
    auto mech = std::make_shared<const StochasticMechanism>(
        StochasticInstance{f.u, io::distributions_from_json(io::read_file(a.dists)), f.metric}, a.gamma_samples,
        a.seed);
    rule = make_stochastic_rule(std::move(mech), f.w);
  } else {
    throw CLI::ValidationError("--rule", "expected lp|logm|stochastic|single-slot");
  }
  if (a.advertiser < 0 || a.advertiser >= rule->advertisers())
    throw CLI::ValidationError("--advertiser", "out of range");
  const int i = a.advertiser;
  const auto curve = expected_allocation_curve(*rule, i, default_bid_grid(*rule, i), a.trials, a.seed);
  const double value = rule->base_bid(i);

  std::cout << "bid,quantity,stderr\n";
  for (std::size_t k = 0; k < curve.bids.size(); ++k)
    std::cout << num(curve.bids[k]) << ',' << num(curve.quantities[k]) << ',' << num(curve.stderrs[k]) << '\n';
  std::cout << "\nbid,payment,utility_at_value\n";
  for (std::size_t k = 0; k < curve.bids.size(); ++k) {
    const double p = myerson_payment_from_curve(curve, curve.bids[k]);
    std::cout << num(curve.bids[k]) << ',' << num(p) << ',' << num(value * curve.quantities[k] - p) << '\n';
  }
  const auto t = truthfulness_audit(curve, value);
  std::cout << "\nvalue,truthful_utility,best_deviation_bid,best_deviation_utility\n";
  std::cout << num(value) << ',' << num(t.truthful_utility) << ',' << num(t.best_deviation_bid) << ','
            << num(t.best_deviation_utility) << '\n';
}

// ---- run ----

void run_config(const std::string& config_path, const std::string& out, std::optional<std::uint64_t> seed,
                std::uint64_t fallback_seed) {
  const std::string text = io::read_file(config_path);
  ExperimentConfig c = config_from_json(text);
  if (seed)
    c.seed = *seed;
  else if (!nlohmann::json::parse(text).contains("seed"))
    c.seed = fallback_seed;
  std::ostringstream csv;
  write_csv(csv, run_experiment(c));
  emit(csv.str(), out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ad-slate allocation under spatial externalities"};
  app.require_subcommand(1);
  std::uint64_t seed = 1;
  try {
    seed = default_seed(1);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }

  GenArgs gen;
  gen.seed = seed;
  auto* g = app.add_subcommand("gen", "Generate a random instance");
  g->add_option("--kind", gen.kind, "nn|pd|unit|factorized|stochastic|dists|graph")->capture_default_str();
  g->add_option("--metric", gen.metric, "euclidean|general")->capture_default_str();
  g->add_option("-n", gen.n, "Advertisers (vertices for graphs)")->capture_default_str()->check(CLI::NonNegativeNumber);
  g->add_option("-m", gen.m, "Slots")->capture_default_str()->check(CLI::PositiveNumber);
  g->add_option("-p", gen.p, "Edge probability for graphs")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("-o,--out", gen.out, "Output file (stdout by default)");
  g->add_option("--points-out", gen.points_out, "Write the euclidean layout here");

  std::string instance_path;
  int cap = 22;
  auto* o = app.add_subcommand("oracle", "Exact optimum by exhaustive search");
  o->add_option("--instance", instance_path)->required()->check(CLI::ExistingFile);
  o->add_option("--cap", cap, "Largest slot count searched")->capture_default_str();

  std::int64_t trials = 1000;
  std::string mode = "virtual";
  std::uint64_t nn_seed = seed;
  auto* nl = app.add_subcommand("nn-lp", "LP rounding allocator for the nearest-neighbour model");
  nl->add_option("--instance", instance_path)->required()->check(CLI::ExistingFile);
  nl->add_option("--seed", nn_seed)->capture_default_str();
  nl->add_option("--trials", trials)->capture_default_str()->check(CLI::PositiveNumber);
  nl->add_option("--mode", mode, "plain|virtual")->capture_default_str();
  nl->add_option("--cap", cap, "Oracle slot cap for the opt column")->capture_default_str();

  std::string algo = "logm", dists;
  std::int64_t gamma_samples = 100'000;
  std::uint64_t f_seed = seed;
  std::int64_t f_trials = 10;
  auto* fz = app.add_subcommand("factorized", "Run the factorized mechanisms and report payments");
  fz->add_option("--instance", instance_path, "Factorized instance (u, w, metric)")->required()->check(CLI::ExistingFile);
  fz->add_option("--algo", algo, "logm|stochastic")->capture_default_str();
  fz->add_option("--dists", dists, "Value distributions (stochastic)")->check(CLI::ExistingFile);
  fz->add_option("--trials", f_trials)->capture_default_str()->check(CLI::PositiveNumber);
  fz->add_option("--seed", f_seed)->capture_default_str();
  fz->add_option("--gamma-samples", gamma_samples)->capture_default_str()->check(CLI::PositiveNumber);

  std::string points_path, u_path;
  double eps = 0.5;
  int ptas_n = 0;
  std::int64_t work_cap = 100'000'000;
  auto* pt = app.add_subcommand("ptas", "Shifted-grid scheme for unit advertisers in the plane");
  pt->add_option("--points", points_path, "JSON list of [x, y]")->required()->check(CLI::ExistingFile);
  pt->add_option("--u", u_path, "JSON list of slot weights")->required()->check(CLI::ExistingFile);
  pt->add_option("--eps", eps)->capture_default_str();
  pt->add_option("-n", ptas_n, "Advertisers (defaults to the slot count)");
  pt->add_option("--work-cap", work_cap)->capture_default_str();

  std::string graph_path, allocator = "oracle";
  auto* pd = app.add_subcommand("proddist", "Independent-set hardness demo for the product-distance model");
  pd->add_option("--graph", graph_path, "Edge list: 'n m' then 'u v' per line")->required()->check(CLI::ExistingFile);
  pd->add_option("--allocator", allocator, "oracle|single-slot")->capture_default_str();

  AuditArgs audit;
  audit.seed = seed;
  auto* au = app.add_subcommand("audit", "Allocation curve, payments and truthfulness for one advertiser");
  au->add_option("--rule", audit.rule, "lp|logm|stochastic|single-slot")->capture_default_str();
  au->add_option("--instance", audit.instance)->required()->check(CLI::ExistingFile);
  au->add_option("--dists", audit.dists)->check(CLI::ExistingFile);
  au->add_option("--advertiser", audit.advertiser)->capture_default_str();
  au->add_option("--trials", audit.trials)->capture_default_str()->check(CLI::PositiveNumber);
  au->add_option("--gamma-samples", audit.gamma_samples)->capture_default_str()->check(CLI::PositiveNumber);
  au->add_option("--seed", audit.seed)->capture_default_str();

  std::string config_path, out;
  std::optional<std::uint64_t> run_seed;
  auto* rn = app.add_subcommand("run", "Run an experiment matrix from a JSON config");
  rn->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  rn->add_option("-o,--out", out, "CSV path (stdout by default)");
  rn->add_option("--seed", run_seed, "Override the config seed");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*g) run_gen(gen);
    if (*o) run_oracle(instance_path, cap);
    if (*nl) run_nn_lp(instance_path, nn_seed, trials, mode, cap);
    if (*fz) run_factorized(instance_path, algo, dists, f_trials, f_seed, gamma_samples);
    if (*pt) run_ptas(points_path, u_path, eps, ptas_n, work_cap);
    if (*pd) run_proddist(graph_path, allocator);
    if (*au) run_audit(audit);
    if (*rn) run_config(config_path, out, run_seed, seed);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
