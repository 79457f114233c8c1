// Command-line front end: construction, verification, witness extraction and
// the iterated strong-regularity experiments, all deterministic under the
// configured seed. Exit codes: 0 success, 1 usage error, 2 verification
// failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "regforge/afks.hpp"
#include "regforge/io.hpp"
#include "regforge/tower.hpp"
#include "regforge/witnesslab.hpp"

using namespace regforge;
using nlohmann::json;

namespace {

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ','))
    if (!tok.empty()) out.push_back(std::stoi(tok));
  return out;
}

std::vector<long> parse_long_list(const std::string& s) {
  std::vector<long> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ','))
    if (!tok.empty()) out.push_back(std::stol(tok));
  return out;
}



// Usage-level problems (bad arguments, missing files) exit 1; failed
// verifications exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rationals coming from the command line are usage input.
Rat cli_rat(const std::string& s) {
  try {
    return parse_rational(s);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

std::vector<Rat> parse_rat_list(const std::string& s) {
  std::vector<Rat> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ','))
    if (!tok.empty()) out.push_back(cli_rat(tok));
  return out;
}

VertexSet parse_set(const std::string& s, long n) {
  VertexSet out(static_cast<size_t>(n));
  for (long v : parse_long_list(s)) {
    if (v < 0 || v >= n)
      throw UsageError("set index " + std::to_string(v) + " out of range");
    out.set(static_cast<size_t>(v));
  }
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw UsageError("cannot open output file '" + path + "'");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot open input file '" + path + "'");
  return is;
}

GraphDump load_graph(const std::string& path) {
  auto is = open_in(path);
  return load_graph_json(is);
}

// Partition spec: "P<r>" for the canonical level-r partition of the graph,
// "k<order>" for canonical intervals of that order, or a path to a file in
// the partition format.
Partition parse_partition(const std::string& spec, const GraphDump& g) {
  if (spec.size() >= 2 && (spec[0] == 'P' || spec[0] == 'p') &&
      isdigit(static_cast<unsigned char>(spec[1]))) {
    int r = std::stoi(spec.substr(1));
    if (r < 0 || r >= static_cast<int>(g.orders.size()))
      throw Error("partition spec '" + spec + "': level out of range");
    return g.canonical_level(r);
  }
  if (spec.size() >= 2 && spec[0] == 'k' &&
      isdigit(static_cast<unsigned char>(spec[1]))) {
    long order = std::stol(spec.substr(1));
    return Partition::canonical(static_cast<size_t>(g.atoms),
                                static_cast<size_t>(order));
  }
  auto is = open_in(spec);
  return Partition::load(is);
}

// Construction flags shared by construct / witness / afks; a JSON config
// supplies defaults and explicit flags win.
struct ConstructArgs {
  ConstructionParams params;
  std::string traps_csv;
  TrapOverrides trap_ov;  // default: condition-1-only verification
  int trap_retries = 16;

  void attach(CLI::App* app) {
    app->add_option("--levels", params.levels, "Gowers levels R");
    app->add_option("--base-weight", base_weight_str,
                    "delta_base as p/q or decimal");
    app->add_option("--traps", traps_csv, "trap levels, comma separated");
    app->add_option("--seed", params.seed, "root seed");
    app->add_option("--atoms-per-class", params.atoms_per_class,
                    "atom grid refinement of the finest level");
    app->add_option("--max-atoms", params.max_atoms, "atom budget");
    app->add_option("--cond1-slack", cond1_slack_str,
                    "trap condition-1 slack (desk default 1/4)");
    app->add_flag("--trap-cond2", with_cond2,
                  "verify trap condition 2 as well");
    app->add_option("--trap-retries", trap_retries, "trap redraw budget");
  }

  void finalize(const json* cfg) {
    auto cfg_str = [&](const char* key, std::string& target) {
      if (target.empty() && cfg && cfg->contains(key))
        target = (*cfg)[key].is_string() ? (*cfg)[key].get<std::string>()
                                         : (*cfg)[key].dump();
    };
    auto cfg_val = [&](const char* key, auto& target, auto zero) {
      if (target == zero && cfg && cfg->contains(key))
        target = (*cfg)[key].get<std::decay_t<decltype(target)>>();
    };
    cfg_val("levels", params.levels, 0);
    cfg_str("base_weight", base_weight_str);
    cfg_str("traps", traps_csv);
    cfg_val("seed", params.seed, uint64_t{0});
    if (!base_weight_str.empty()) params.delta_base = cli_rat(base_weight_str);
    if (!traps_csv.empty()) params.trap_levels = parse_int_list(traps_csv);
    if (!cond1_slack_str.empty()) trap_ov.cond1_slack = cli_rat(cond1_slack_str);
    trap_ov.check_cond2 = with_cond2;
    trap_ov.seed = params.seed;
  }

  std::string base_weight_str, cond1_slack_str;
  bool with_cond2 = false;
};

int threads_from_env() {
  if (const char* env = std::getenv("REGFORGE_THREADS")) {
    int t = std::atoi(env);
    if (t >= 1) return t;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regforge: hard weighted graphs for strong regularity, with "
               "verified ingredients and witness extraction"};
  app.require_subcommand(1);
  std::string config_path;
  int threads = threads_from_env();
  app.add_option("--config", config_path, "JSON config with per-command defaults");
  app.add_option("--threads", threads, "worker threads for pair scans");

  // schedule
  auto* sched = app.add_subcommand("schedule", "tower arithmetic report");
  long tower_x = -1, wowzer_x = -1, tphi_x = -1, sched_w1 = -1;
  int sched_count = 1;
  sched->add_option("--tower", tower_x, "print T(x)");
  sched->add_option("--wowzer", wowzer_x, "print W(x)");
  sched->add_option("--tphi", tphi_x, "print T^phi(x)");
  sched->add_option("--w1", sched_w1, "trap schedule from w(1)");
  sched->add_option("--count", sched_count, "trap schedule length");

  // construct
  auto* con = app.add_subcommand("construct", "build G/H and dump graph+ledger");
  ConstructArgs con_args;
  con_args.attach(con);
  std::string con_out_graph = "graph.json", con_out_ledger;
  con->add_option("--out-graph", con_out_graph, "graph JSON path");
  con->add_option("--out-ledger", con_out_ledger, "ledger CSV path");

  // trap gen / verify
  auto* trap = app.add_subcommand("trap", "trap generation and verification");
  trap->require_subcommand(1);
  auto* trap_gen = trap->add_subcommand("gen", "draw and verify a trap");
  auto* trap_verify = trap->add_subcommand("verify", "verify a trap edge list");
  long trap_size = 16;
  std::string trap_orders = "1,2,4,8", trap_edges_path, trap_out_edges,
      trap_out_verification;
  uint64_t trap_seed = 0;
  int trap_retries = 16;
  bool trap_cond2 = false;
  std::string trap_c1_slack, trap_c2_slack;
  int trap_kmin = 2, trap_kmax = 0, trap_p = 2;
  for (CLI::App* t : {trap_gen, trap_verify}) {
    t->add_option("--size", trap_size, "trap vertex count m_b");
    t->add_option("--orders", trap_orders, "coarser canonical orders");
    t->add_flag("--cond2", trap_cond2, "check condition 2");
    t->add_option("--cond1-slack", trap_c1_slack, "condition-1 slack");
    t->add_option("--cond2-slack", trap_c2_slack, "condition-2 slack");
    t->add_option("--k-min", trap_kmin, "condition-2 k lower bound");
    t->add_option("--k-max", trap_kmax, "condition-2 k upper bound (0: log2 m)");
    t->add_option("--size-exponent", trap_p, "condition-2 |R| = k^p");
    t->add_option("--out-verification", trap_out_verification,
                  "verification JSON path");
  }
  trap_gen->add_option("--seed", trap_seed, "rng seed");
  trap_gen->add_option("--retries", trap_retries, "redraw budget");
  trap_gen->add_option("--out-edges", trap_out_edges, "edge CSV path");
  trap_verify->add_option("--edges", trap_edges_path, "edge CSV path")->required();

  // balanced gen / verify
  auto* bal = app.add_subcommand("balanced", "balanced partition families");
  bal->require_subcommand(1);
  auto* bal_gen = bal->add_subcommand("gen", "generate a verified family");
  auto* bal_verify = bal->add_subcommand("verify", "verify a family file");
  long bal_m = 17;
  uint64_t bal_seed = 0;
  std::string bal_out, bal_file;
  bal_gen->add_option("--m", bal_m, "family size m (M = 2^ceil(m/16))");
  bal_gen->add_option("--seed", bal_seed, "rng seed");
  bal_gen->add_option("--out", bal_out, "family file path");
  bal_verify->add_option("--file", bal_file, "family file path")->required();

  // decompose
  auto* dec = app.add_subcommand("decompose", "convex decomposition of x over k-subsets");
  std::string dec_x;
  int dec_k = 1;
  dec->add_option("--x", dec_x, "vector entries, comma separated rationals")->required();
  dec->add_option("--k", dec_k, "subset size")->required();

  // check pair / partition / ef
  auto* chk = app.add_subcommand("check", "regularity checks");
  chk->require_subcommand(1);
  auto* chk_pair = chk->add_subcommand("pair", "gamma-regularity of a pair");
  auto* chk_part = chk->add_subcommand("partition", "gamma-regularity of a partition");
  auto* chk_ef = chk->add_subcommand("ef", "(eps,f)-regularity of two partitions");
  std::string chk_graph, chk_a, chk_b, chk_gamma = "1/8", chk_mode = "exact";
  std::string chk_eps = "1/8", chk_f = "1/8", chk_partition_file, chk_out;
  uint64_t chk_seed = 0;
  for (CLI::App* c : {chk_pair, chk_part, chk_ef}) {
    c->add_option("--graph", chk_graph, "graph JSON path")->required();
    c->add_option("--mode", chk_mode, "exact|heuristic");
    c->add_option("--seed", chk_seed, "heuristic restart seed");
    c->add_option("--out", chk_out, "report JSON path");
  }
  chk_pair->add_option("--a", chk_a, "atoms of side A")->required();
  chk_pair->add_option("--b", chk_b, "atoms of side B")->required();
  chk_pair->add_option("--gamma", chk_gamma, "regularity parameter");
  chk_part->add_option("--partition", chk_partition_file,
                       "partition file or P<r>/k<order> spec")->required();
  chk_part->add_option("--gamma", chk_gamma, "regularity parameter");
  chk_ef->add_option("--A", chk_a, "coarse partition (P<r>, k<order> or file)")->required();
  chk_ef->add_option("--B", chk_b, "fine partition (P<r>, k<order> or file)")->required();
  chk_ef->add_option("--eps", chk_eps, "epsilon");
  chk_ef->add_option("--f-value", chk_f, "f(|A|) for condition 1");

  // witness sweep
  auto* wit = app.add_subcommand("witness", "witness extraction");
  wit->require_subcommand(1);
  auto* wit_sweep = wit->add_subcommand("sweep", "sweep helpful certificates");
  ConstructArgs wit_args;
  wit_args.attach(wit_sweep);
  std::string wit_z = "P1", wit_beta = "1/4", wit_delta = "1/2", wit_gamma, wit_out;
  int wit_level = 2;
  wit_sweep->add_option("--z", wit_z, "partition spec for Z");
  wit_sweep->add_option("--level", wit_level, "Gowers level r of the splits");
  wit_sweep->add_option("--beta", wit_beta, "containment parameter");
  wit_sweep->add_option("--delta", wit_delta, "peeling parameter");
  wit_sweep->add_option("--gamma", wit_gamma, "witness size/gap floor");
  wit_sweep->add_option("--out", wit_out, "witness JSON path");

  // peel
  auto* peel_cmd = app.add_subcommand("peel", "staged descent through trap levels");
  std::string peel_graph, peel_set, peel_levels, peel_delta = "1/2";
  peel_cmd->add_option("--graph", peel_graph, "graph JSON path")->required();
  peel_cmd->add_option("--set", peel_set, "atom indices of the start set")->required();
  peel_cmd->add_option("--trap-levels", peel_levels,
                       "canonical levels to peel through")->required();
  peel_cmd->add_option("--delta", peel_delta, "peeling parameter");

  // sample
  auto* smp = app.add_subcommand("sample", "sample an unweighted instance");
  std::string smp_graph, smp_out = "edges.csv";
  long smp_n = 0;
  uint64_t smp_seed = 0;
  smp->add_option("--graph", smp_graph, "graph JSON path")->required();
  smp->add_option("--n", smp_n, "vertex count (multiple of the atom count)")->required();
  smp->add_option("--seed", smp_seed, "sampling seed");
  smp->add_option("--out", smp_out, "edge CSV path");

  // afks run
  auto* afks_cmd = app.add_subcommand("afks", "iterated strong-regularity process");
  afks_cmd->require_subcommand(1);
  auto* afks_run = afks_cmd->add_subcommand("run", "run the iteration");
  ConstructArgs afks_args;
  afks_args.attach(afks_run);
  std::string afks_eps = "1/8", afks_out_csv, afks_out_json;
  int afks_budget = 8;
  long afks_sampled_n = 0;
  uint64_t afks_sample_seed = 0, afks_check_seed = 0;
  afks_run->add_option("--eps", afks_eps, "epsilon");
  afks_run->add_option("--budget", afks_budget, "iteration budget");
  afks_run->add_option("--check-seed", afks_check_seed, "heuristic seed");
  afks_run->add_option("--sampled-n", afks_sampled_n,
                       "run on a sampled instance of this size instead");
  afks_run->add_option("--sample-seed", afks_sample_seed, "sampling seed");
  afks_run->add_option("--out-csv", afks_out_csv, "trace CSV path");
  afks_run->add_option("--out-json", afks_out_json, "trace JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // usage errors exit 1; --help exits 0
  }

  try {
    json cfg;
    if (!config_path.empty()) {
      auto is = open_in(config_path);
      is >> cfg;
    }
    auto section = [&cfg](const char* name) -> const json* {
      return cfg.contains(name) ? &cfg[name] : nullptr;
    };

    if (sched->parsed()) {
      if (tower_x >= 0) std::cout << TowerNum::tower(Int(tower_x)).str() << "\n";
      if (wowzer_x >= 0) std::cout << TowerNum::wowzer(wowzer_x).str() << "\n";
      if (tphi_x >= 0) std::cout << TowerNum::t_phi(tphi_x).str() << "\n";
      if (sched_w1 >= 0) {
        // A schedule that cannot be materialized is a failed verification of
        // the requested levels, not a usage problem.
        try {
          TrapSchedule ts = TrapSchedule::from_first_level(sched_w1, sched_count);
          std::cout << "levels:";
          for (long b : ts.levels) std::cout << ' ' << b;
          std::cout << "\nweights:";
          for (const Rat& w : ts.weights) std::cout << ' ' << rat_str(w);
          std::cout << "\ntotal_weight: " << rat_str(ts.total_weight()) << "\n";
        } catch (const Error& e) {
          std::cerr << "error: " << e.what() << "\n";
          return 2;
        }
      }
      return 0;
    }

    if (con->parsed()) {
      con_args.finalize(section("construct"));
      BlockWeightedGraph h =
          build_h(con_args.params, con_args.trap_ov, con_args.trap_retries);
      GraphDump d = dump_of(h);
      {
        auto os = open_out(con_out_graph);
        save_graph_json(d, os);
      }
      if (!con_out_ledger.empty()) {
        auto os = open_out(con_out_ledger);
        save_ledger_csv(h, os);
      }
      std::cout << "atoms: " << h.atoms() << "\norders:";
      for (long m : h.orders()) std::cout << ' ' << m;
      std::cout << "\ntraps:";
      for (const PlacedTrap& t : h.traps())
        std::cout << " g=" << t.g << "@level" << t.level << " weight "
                  << rat_str(t.weight);
      std::cout << "\ngraph: " << con_out_graph << "\n";
      return 0;
    }

    if (trap->parsed()) {
      TrapOverrides ov;
      ov.check_cond2 = trap_cond2;
      if (!trap_c1_slack.empty()) ov.cond1_slack = cli_rat(trap_c1_slack);
      if (!trap_c2_slack.empty()) ov.cond2_slack = cli_rat(trap_c2_slack);
      ov.k_min = trap_kmin;
      ov.k_max = trap_kmax;
      ov.size_exponent = trap_p;
      ov.seed = trap_seed;
      std::vector<long> orders = parse_long_list(trap_orders);
      if (trap_gen->parsed()) {
        Rng rng(trap_seed);
        TrapSpec spec = generate_trap(trap_size, orders, rng, ov, trap_retries);
        if (!trap_out_edges.empty()) {
          auto os = open_out(trap_out_edges);
          save_adj_csv(spec.graph, os);
        }
        std::string vjson = spec.verification->to_json();
        if (!trap_out_verification.empty()) open_out(trap_out_verification) << vjson << "\n";
        std::cout << vjson << "\n";
        return 0;
      }
      auto is = open_in(trap_edges_path);
      AdjMatrix q = load_adj_csv(is, trap_size);
      TrapVerification v = verify_trap(q, orders, ov);
      std::string vjson = v.to_json();
      if (!trap_out_verification.empty()) open_out(trap_out_verification) << vjson << "\n";
      std::cout << vjson << "\n";
      return v.pass() ? 0 : 2;
    }

    if (bal->parsed()) {
      if (bal_gen->parsed()) {
        Rng rng(bal_seed);
        BalancedFamily fam = generate_balanced(bal_m, rng);
        if (!bal_out.empty()) {
          auto os = open_out(bal_out);
          save_balanced(fam, os);
        } else {
          save_balanced(fam, std::cout);
        }
        return 0;
      }
      auto is = open_in(bal_file);
      BalancedFamily fam = load_balanced(is);
      auto [ok, worst] = verify_balanced(fam);
      std::cout << "balanced: " << (ok ? "true" : "false") << "\nworst: pair ("
                << worst.j << "," << worst.j2 << ") co-occurs " << worst.count
                << " of " << fam.m << " times (bound 3m/4)\n";
      return ok ? 0 : 2;
    }

    if (dec->parsed()) {
      std::vector<Rat> x = parse_rat_list(dec_x);
      ConvexDecomposition d = decompose(x, dec_k);
      for (const ConvexTerm& t : d.terms) {
        std::cout << rat_str(t.coef) << " * v_{";
        for (size_t i = 0; i < t.support.size(); ++i)
          std::cout << (i ? "," : "") << t.support[i];
        std::cout << "}\n";
      }
      bool exact = reconstruct(d, x.size()) == x;
      std::cout << "reconstruction: " << (exact ? "exact" : "MISMATCH") << "\n";
      return exact ? 0 : 2;
    }

    if (chk->parsed()) {
      GraphDump g = load_graph(chk_graph);
      DensityView view = g.view();
      CheckOptions opt;
      opt.mode = chk_mode == "heuristic" ? CheckOptions::Mode::heuristic
                                         : CheckOptions::Mode::exact;
      opt.seed = chk_seed;
      opt.threads = threads;
      if (chk_pair->parsed()) {
        auto v = check_pair(view, parse_set(chk_a, g.atoms),
                            parse_set(chk_b, g.atoms),
                            cli_rat(chk_gamma), opt);
        std::string out = v.to_json();
        if (!chk_out.empty()) open_out(chk_out) << out << "\n";
        std::cout << out << "\n";
        return 0;
      }
      if (chk_part->parsed()) {
        Partition Z = parse_partition(chk_partition_file, g);
        auto res = check_partition(view, Z, cli_rat(chk_gamma), opt);
        std::cout << "regular: " << (res.regular ? "true" : "false")
                  << "\nirregular_pairs: " << res.irregular.size() << " of "
                  << res.pairs << " (threshold " << rat_str(res.threshold)
                  << ")\n";
        for (const auto& [pair, verdict] : res.irregular)
          std::cout << "  (" << pair.first << "," << pair.second
                    << "): " << verdict.to_json() << "\n";
        return 0;
      }
      Partition A = parse_partition(chk_a, g);
      Partition B = parse_partition(chk_b, g);
      auto rep = check_ef_regular(view, A, B, cli_rat(chk_eps),
                                  cli_rat(chk_f), opt);
      std::cout << "cond1=" << (rep.cond1 ? "true" : "false")
                << " cond2=" << (rep.cond2 ? "true" : "false")
                << " good=" << rep.good_count << "/" << (rep.k * (rep.k - 1) / 2)
                << " needed=" << rat_str(rep.good_needed) << "\n";
      if (!chk_out.empty()) {
        auto os = open_out(chk_out);
        os << "{\"cond1\":" << (rep.cond1 ? "true" : "false")
           << ",\"cond2\":" << (rep.cond2 ? "true" : "false")
           << ",\"good_count\":" << rep.good_count << ",\"reports\":[";
        for (size_t t = 0; t < rep.reports.size(); ++t) {
          const GoodPairReport& r = rep.reports[t];
          os << (t ? "," : "") << "{\"i\":" << r.i << ",\"j\":" << r.j
             << ",\"deviant\":" << r.deviant_count
             << ",\"good\":" << (r.good ? "true" : "false") << ",\"density\":\""
             << rat_str(r.pair_density) << "\"}";
        }
        os << "]}\n";
      }
      return 0;
    }

    if (wit->parsed()) {
      wit_args.finalize(section("witness"));
      BlockWeightedGraph h =
          build_h(wit_args.params, wit_args.trap_ov, wit_args.trap_retries);
      GraphDump d = dump_of(h);
      Partition Z = parse_partition(wit_z, d);
      Rat beta = cli_rat(wit_beta);
      Rat delta = cli_rat(wit_delta);
      Rat gamma = wit_gamma.empty()
                      ? wit_args.params.level_weight(wit_level) / 4
                      : cli_rat(wit_gamma);
      auto certs = helpful_pairs(h, Z, wit_level, beta);
      long found = 0;
      std::ostringstream all;
      all << "[";
      for (size_t c = 0; c < certs.size(); ++c) {
        WitnessReport rep = irregularity_witness(h, certs[c], delta, gamma);
        if (rep.found) ++found;
        all << (c ? "," : "") << rep.to_json();
      }
      all << "]";
      if (!wit_out.empty()) open_out(wit_out) << all.str() << "\n";
      std::cout << "certificates: " << certs.size() << "\nwitnesses: " << found
                << "\n";
      if (!certs.empty())
        std::cout << "fraction: " << rat_str(frac(found, certs.size())) << "\n";
      return 0;
    }

    if (peel_cmd->parsed()) {
      GraphDump g = load_graph(peel_graph);
      VertexSet A = parse_set(peel_set, g.atoms);
      std::vector<Partition> parts;
      for (int r : parse_int_list(peel_levels)) parts.push_back(g.canonical_level(r));
      PeelTrace trace = peel(A, parts, cli_rat(peel_delta));
      std::cout << "start_size: " << trace.start.count()
                << "\ndescents: " << trace.descents
                << "\nfinal_size: " << trace.final_set.count() << "\nfinal:";
      for (size_t v = trace.final_set.find_first(); v != VertexSet::npos;
           v = trace.final_set.find_next(v))
        std::cout << ' ' << v;
      std::cout << "\n";
      return 0;
    }

    if (smp->parsed()) {
      GraphDump g = load_graph(smp_graph);
      SampledGraph s = sample_from_cells(
          g.atoms, [&g](long u, long v) { return g.weights[u][v]; }, smp_n,
          smp_seed);
      auto os = open_out(smp_out);
      save_edges_csv(s, os);
      long edges = 0;
      for (long u = 0; u < s.n; ++u) edges += static_cast<long>(s.adj[u].count());
      std::cout << "n: " << s.n << "\nedges: " << edges / 2 << "\nout: " << smp_out
                << "\n";
      return 0;
    }

    if (afks_cmd->parsed()) {
      afks_args.finalize(section("afks"));
      BlockWeightedGraph h =
          build_h(afks_args.params, afks_args.trap_ov, afks_args.trap_retries);
      AfksOptions opt;
      opt.budget = afks_budget;
      opt.refine.check.mode = CheckOptions::Mode::heuristic;
      opt.refine.check.seed = afks_check_seed;
      opt.refine.check.threads = threads;
      IterationTrace trace;
      if (afks_sampled_n > 0) {
        SampledGraph s = sample_unweighted(h, afks_sampled_n, afks_sample_seed);
        trace = afks_iterate(view_of(s), nullptr, cli_rat(afks_eps), opt);
      } else {
        trace = afks_iterate(view_of(h), &h, cli_rat(afks_eps), opt);
      }
      if (!afks_out_csv.empty()) open_out(afks_out_csv) << trace.to_csv();
      if (!afks_out_json.empty()) open_out(afks_out_json) << trace.to_json() << "\n";
      std::cout << trace.to_csv() << "stop: " << trace.stop_reason << "\n";
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    // Failed construction invariants (trap retry budgets, weight caps, ...)
    // are verification failures; malformed values are usage errors.
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
