// treematch: design balanced template trees and greedily match independent
// random-graph pairs, reporting achieved overlap against the analytic target.
//
// Exit codes: 0 success, 2 configuration/input error, 3 design infeasible
// within the budget, 4 run finished but an embedding enumeration hit the cap.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "treematch/harness.hpp"

namespace {

using namespace treematch;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) out.push_back(cur);
  return out;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::string resolved = resolve_out_path(out_path);
  std::ofstream f(resolved);
  if (!f) throw ConfigError("cannot open output file '" + resolved + "'");
  f << text;
  if (!f) throw ConfigError("failed writing '" + resolved + "'");
}

std::uint64_t parse_u64(const std::string& s) {
  try {
    std::size_t pos = 0;
    unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("not an unsigned integer: '" + s + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"balanced-tree greedy matching of independent random-graph pairs"};
  app.require_subcommand(1);

  // design
  auto* cmd_design = app.add_subcommand("design", "design the template tree for (alpha, epsilon)");
  std::string d_alpha, d_epsilon, d_out;
  int d_zeta_max = 10;
  cmd_design->add_option("--alpha", d_alpha, "edge exponent, in (0.5, 1)")->required();
  cmd_design->add_option("--epsilon", d_epsilon, "target slack, in (0, 1)")->required();
  cmd_design->add_option("--zeta-max", d_zeta_max, "edge budget for the tree (default 10)");
  cmd_design->add_option("--out", d_out, "output file (default stdout)");

  // run
  auto* cmd_run = app.add_subcommand("run", "one matching experiment on a sampled pair");
  std::string r_alpha, r_epsilon, r_out, r_graphs;
  int r_n = 0, r_zeta_max = 10, r_threshold = 2;
  std::uint64_t r_seed = 1;
  long long r_embed_cap = 1000000, r_kappa0 = 0;
  bool r_no_baselines = false;
  cmd_run->add_option("--n", r_n, "vertex count")->required();
  cmd_run->add_option("--alpha", r_alpha, "edge exponent, in (0.5, 1); p = n^-alpha")->required();
  cmd_run->add_option("--epsilon", r_epsilon, "target slack, in (0, 1)")->required();
  cmd_run->add_option("--seed", r_seed, "experiment seed (default 1)");
  cmd_run->add_option("--zeta-max", r_zeta_max, "edge budget for the tree (default 10)");
  cmd_run->add_option("--embed-cap", r_embed_cap,
                      "max embeddings per enumeration (default 1000000)");
  cmd_run->add_option("--kappa0", r_kappa0, "override the vertex reuse bound");
  cmd_run->add_option("--baseline-threshold", r_threshold,
                      "common-neighbor threshold for the baseline matcher (default 2)");
  cmd_run->add_flag("--no-baselines", r_no_baselines, "skip baseline matchers");
  cmd_run->add_option("--out", r_out, "report file (default stdout)");
  cmd_run->add_option("--graphs", r_graphs,
                      "dump the sampled pair to <prefix>_g.edges and <prefix>_h.edges");

  // sweep
  auto* cmd_sweep = app.add_subcommand("sweep", "grid of runs over n and seeds, CSV output");
  std::string s_alpha, s_epsilon, s_out, s_n_list, s_seed_list;
  int s_zeta_max = 10, s_threshold = 2;
  long long s_embed_cap = 1000000;
  bool s_no_baselines = false;
  cmd_sweep->add_option("--n", s_n_list, "comma-separated vertex counts")->required();
  cmd_sweep->add_option("--seeds", s_seed_list, "comma-separated seeds")->required();
  cmd_sweep->add_option("--alpha", s_alpha, "edge exponent, in (0.5, 1)")->required();
  cmd_sweep->add_option("--epsilon", s_epsilon, "target slack, in (0, 1)")->required();
  cmd_sweep->add_option("--zeta-max", s_zeta_max, "edge budget for the tree (default 10)");
  cmd_sweep->add_option("--embed-cap", s_embed_cap,
                        "max embeddings per enumeration (default 1000000)");
  cmd_sweep->add_flag("--no-baselines", s_no_baselines, "skip baseline matchers");
  cmd_sweep->add_option("--baseline-threshold", s_threshold,
                        "common-neighbor threshold for the baseline matcher (default 2)");
  cmd_sweep->add_option("--out", s_out, "CSV file (default stdout)");

  // brute
  auto* cmd_brute = app.add_subcommand("brute", "exact maximum overlap of two edge lists (n <= 9)");
  std::string b_a, b_b, b_out;
  cmd_brute->add_option("--a", b_a, "first edge-list file")->required();
  cmd_brute->add_option("--b", b_b, "second edge-list file")->required();
  cmd_brute->add_option("--out", b_out, "output file (default stdout)");

  // bound
  auto* cmd_bound = app.add_subcommand("bound", "log first-moment bound for overlap rho*n");
  int f_n = 0;
  double f_p = 0.0, f_rho = 0.0;
  cmd_bound->add_option("--n", f_n, "vertex count")->required();
  cmd_bound->add_option("--p", f_p, "edge probability, in (0, 1)")->required();
  cmd_bound->add_option("--rho", f_rho, "overlap target per vertex, >= 0")->required();
  std::string f_out;
  cmd_bound->add_option("--out", f_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_design->parsed()) {
      Design d = design_tree(rat_from_decimal(d_alpha), rat_from_decimal(d_epsilon), d_zeta_max);
      emit(d_out, design_to_json(d).dump(2) + "\n");
      return 0;
    }
    if (cmd_run->parsed()) {
      RunConfig cfg;
      cfg.n = r_n;
      cfg.alpha = rat_from_decimal(r_alpha);
      cfg.epsilon = rat_from_decimal(r_epsilon);
      cfg.seed = r_seed;
      cfg.zeta_max = r_zeta_max;
      cfg.embed_cap = r_embed_cap;
      if (cmd_run->count("--kappa0")) cfg.kappa0_override = r_kappa0;
      cfg.baselines = !r_no_baselines;
      cfg.baseline_threshold = r_threshold;
      RunReport rep = run_experiment(cfg);
      Json j = report_to_json(rep);
      if (!r_graphs.empty()) {
        std::string pg = resolve_out_path(r_graphs + "_g.edges");
        std::string ph = resolve_out_path(r_graphs + "_h.edges");
        write_edge_list(rep.g, pg);
        write_edge_list(rep.h, ph);
        j["graphs"]["g"] = pg;
        j["graphs"]["h"] = ph;
      }
      emit(r_out, j.dump(2) + "\n");
      if (rep.cap_hit) {
        std::cerr << "warning: embedding cap " << cfg.embed_cap << " was hit in "
                  << rep.cap_steps << " step(s); results may be truncated\n";
        return 4;
      }
      return 0;
    }
    if (cmd_sweep->parsed()) {
      std::vector<RunConfig> configs;
      for (const std::string& ns : split_list(s_n_list))
        for (const std::string& ss : split_list(s_seed_list)) {
          RunConfig cfg;
          cfg.n = static_cast<int>(parse_u64(ns));
          cfg.alpha = rat_from_decimal(s_alpha);
          cfg.epsilon = rat_from_decimal(s_epsilon);
          cfg.seed = parse_u64(ss);
          cfg.zeta_max = s_zeta_max;
          cfg.embed_cap = s_embed_cap;
          cfg.baselines = !s_no_baselines;
          cfg.baseline_threshold = s_threshold;
          configs.push_back(cfg);
        }
      if (configs.empty()) throw ConfigError("sweep: empty n/seed grid");
      std::vector<SweepRow> rows;
      if (s_out.empty()) {
        rows = sweep(configs, std::cout);
      } else {
        std::string resolved = resolve_out_path(s_out);
        std::ofstream f(resolved);
        if (!f) throw ConfigError("cannot open output file '" + resolved + "'");
        rows = sweep(configs, f);
      }
      bool any_cap = false;
      for (const SweepRow& row : rows)
        if (row.report && row.report->cap_hit) any_cap = true;
      if (any_cap) {
        std::cerr << "warning: embedding cap was hit in at least one run\n";
        return 4;
      }
      return 0;
    }
    if (cmd_brute->parsed()) {
      GraphSample a = read_edge_list(b_a);
      GraphSample b = read_edge_list(b_b);
      BruteResult res = brute_force_max(a, b);
      Json j;
      j["kind"] = "brute_max";
      j["version"] = 1;
      j["n"] = a.n;
      j["value"] = res.value;
      j["pi"] = std::vector<int>(res.pi.begin() + 1, res.pi.end());
      emit(b_out, j.dump(2) + "\n");
      return 0;
    }
    if (cmd_bound->parsed()) {
      double v = first_moment_bound(f_n, f_p, f_rho);
      Json j;
      j["kind"] = "first_moment_bound";
      j["version"] = 1;
      j["n"] = f_n;
      j["p"] = f_p;
      j["rho"] = f_rho;
      if (std::isfinite(v))
        j["log_bound"] = v;
      else
        j["log_bound"] = "-inf";  // JSON has no infinities
      emit(f_out, j.dump(2) + "\n");
      return 0;
    }
  } catch (const DesignError& e) {
    std::cerr << "design error: " << e.what() << '\n';
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;  // unreachable: a subcommand is required
}
