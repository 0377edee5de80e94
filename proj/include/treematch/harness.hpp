#pragma once
// Experiment orchestration: sample two graphs, design the tree, run the
// greedy matcher, score the result against the analytic target, and emit
// machine-readable reports (JSON per run, CSV per sweep).

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "treematch/evaluation.hpp"
#include "treematch/graph.hpp"
#include "treematch/matcher.hpp"
#include "treematch/tree.hpp"

namespace treematch {

using Json = nlohmann::ordered_json;

struct RunConfig {
  int n = 0;
  Rational alpha;
  Rational epsilon;
  std::uint64_t seed = 0;
  std::optional<long long> kappa0_override;
  int zeta_max = 10;
  long long embed_cap = 1000000;
  bool baselines = true;
  int baseline_threshold = 2;
};

// Sub-seed derivation: the two samples and the priority order get distinct
// streams from the one user seed, stable across platforms and releases.
inline std::uint64_t derive_seed_g(std::uint64_t seed) { return seed; }
inline std::uint64_t derive_seed_h(std::uint64_t seed) {
  return mix64(seed ^ 0x6a09e667f3bcc909ull);
}
inline std::uint64_t derive_order_seed(std::uint64_t seed) {
  return mix64(seed ^ 0xbb67ae8584caa73bull);
}

struct RunReport {
  RunConfig config;
  Design design;
  double p = 0.0;
  long long m0 = 0;
  long long steps = 0, successes = 0, failures = 0, cap_steps = 0;
  bool cap_hit = false;
  double mean_candidates = 0.0;
  long long overlap_value = 0;
  long long certified = 0;  // zeta * successes, a verified lower bound
  double overlap_ratio = 0.0;    // overlap / n
  double certified_ratio = 0.0;  // certified / n
  double target_ratio = 0.0;     // requested: (1-eps)/(2*alpha-1)
  double achieved_ratio = 0.0;   // designed guarantee: (1-2*eta)/(2*alpha_tilde-1)
  double expected_random = 0.0;
  std::optional<ThresholdResult> threshold_baseline;
  std::vector<int> pi;
  std::vector<StepRecord> trace;
  double wallclock_ms = 0.0;
  GraphSample g, h;
};

inline RunReport run_experiment(const RunConfig& cfg) {
  if (cfg.n < 2) throw ConfigError("run: n must be >= 2, got " + std::to_string(cfg.n));
  if (cfg.embed_cap < 1) throw ConfigError("run: embed_cap must be >= 1");
  if (cfg.kappa0_override && *cfg.kappa0_override < 1)
    throw ConfigError("run: kappa0 override must be >= 1");

  RunReport rep;
  rep.config = cfg;
  rep.design = design_tree(cfg.alpha, cfg.epsilon, cfg.zeta_max);
  if (cfg.kappa0_override) rep.design.params.kappa0 = *cfg.kappa0_override;
  const TreeTemplate& tree = rep.design.tree;
  const ParamSet& params = rep.design.params;

  rep.p = std::pow(static_cast<double>(cfg.n), -rat_to_double(cfg.alpha));
  rep.g = sample_er(cfg.n, rep.p, derive_seed_g(cfg.seed));
  rep.h = sample_er(cfg.n, rep.p, derive_seed_h(cfg.seed));

  auto t0 = std::chrono::steady_clock::now();
  GreedyResult greedy =
      run_greedy(rep.g, rep.h, tree, params, derive_order_seed(cfg.seed), cfg.embed_cap);
  auto t1 = std::chrono::steady_clock::now();
  rep.wallclock_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

  rep.m0 = greedy.m0;
  rep.pi = std::move(greedy.pi);
  rep.trace = std::move(greedy.trace);
  rep.steps = static_cast<long long>(rep.trace.size());
  long long cand_total = 0;
  for (const StepRecord& r : rep.trace) {
    rep.successes += r.success ? 1 : 0;
    rep.cap_steps += r.cap_hit ? 1 : 0;
    cand_total += r.cand_size;
  }
  rep.failures = rep.steps - rep.successes;
  rep.cap_hit = rep.cap_steps > 0;
  rep.mean_candidates =
      rep.steps > 0 ? static_cast<double>(cand_total) / static_cast<double>(rep.steps) : 0.0;

  rep.overlap_value = overlap(rep.g, rep.h, rep.pi);
  rep.certified = static_cast<long long>(tree.zeta) * rep.successes;
  TraceAudit audit = audit_trace(rep.g, rep.h, tree, rep.trace, rep.pi);
  if (audit.violations != 0 || rep.certified > rep.overlap_value)
    throw std::logic_error("run: trace audit failed; matched copies are inconsistent");

  rep.overlap_ratio = static_cast<double>(rep.overlap_value) / cfg.n;
  rep.certified_ratio = static_cast<double>(rep.certified) / cfg.n;
  rep.target_ratio = rat_to_double((1 - cfg.epsilon) / (2 * cfg.alpha - 1));
  rep.achieved_ratio =
      rat_to_double((1 - 2 * params.eta) / (2 * params.alpha_tilde - 1));
  rep.expected_random = expected_random_overlap(cfg.n, rep.p);
  if (cfg.baselines)
    rep.threshold_baseline =
        threshold_matcher(rep.g, rep.h, cfg.baseline_threshold, params.eta);
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization

inline Json design_to_json(const Design& d) {
  Json j;
  j["kind"] = "design";
  j["version"] = 1;
  j["alpha"] = rat_to_double(d.params.alpha);
  j["alpha_exact"] = rat_to_pq(d.params.alpha);
  j["epsilon"] = rat_to_double(d.params.epsilon);
  j["epsilon_exact"] = rat_to_pq(d.params.epsilon);
  j["k"] = d.params.k;
  j["eta"] = rat_to_double(d.params.eta);
  j["eta_exact"] = rat_to_pq(d.params.eta);
  j["beta_terms"] = d.params.beta_terms;
  j["ell"] = d.params.ell;
  j["chi"] = d.tree.chi;
  j["zeta"] = d.tree.zeta;
  j["xi"] = d.tree.xi;
  j["alpha_eta"] = rat_to_pq(d.params.alpha_eta);
  j["alpha_tilde"] = rat_to_pq(d.params.alpha_tilde);
  j["kappa0"] = d.params.kappa0;
  j["zeta_max"] = d.params.zeta_max;
  j["verified"] = Json::object();
  if (d.verified_exhaustive)
    j["verified"]["exhaustive"] = *d.verified_exhaustive;
  else
    j["verified"]["exhaustive"] = nullptr;
  j["verified"]["structural"] = d.verified_structural;
  return j;
}

inline Json report_to_json(const RunReport& rep, bool include_wallclock = true) {
  Json j;
  j["kind"] = "run_report";
  j["version"] = 1;
  Json& cfg = j["config"] = Json::object();
  cfg["n"] = rep.config.n;
  cfg["alpha"] = rat_to_double(rep.config.alpha);
  cfg["alpha_exact"] = rat_to_pq(rep.config.alpha);
  cfg["epsilon"] = rat_to_double(rep.config.epsilon);
  cfg["epsilon_exact"] = rat_to_pq(rep.config.epsilon);
  cfg["seed"] = rep.config.seed;
  if (rep.config.kappa0_override)
    cfg["kappa0_override"] = *rep.config.kappa0_override;
  else
    cfg["kappa0_override"] = nullptr;
  cfg["zeta_max"] = rep.config.zeta_max;
  cfg["embed_cap"] = rep.config.embed_cap;
  cfg["baselines"] = rep.config.baselines;
  cfg["baseline_threshold"] = rep.config.baseline_threshold;
  Json& der = j["derived"] = Json::object();
  der["p"] = rep.p;
  der["m0"] = rep.m0;
  der["seed_g"] = derive_seed_g(rep.config.seed);
  der["seed_h"] = derive_seed_h(rep.config.seed);
  der["order_seed"] = derive_order_seed(rep.config.seed);

  Json tree = design_to_json(rep.design);
  tree.erase("kind");
  tree.erase("version");
  tree.erase("alpha");
  tree.erase("alpha_exact");
  tree.erase("epsilon");
  tree.erase("epsilon_exact");
  j["tree"] = std::move(tree);

  Json& tgt = j["targets"] = Json::object();
  tgt["target_ratio"] = rep.target_ratio;
  tgt["achieved_ratio"] = rep.achieved_ratio;

  Json& res = j["result"] = Json::object();
  res["steps"] = rep.steps;
  res["successes"] = rep.successes;
  res["failures"] = rep.failures;
  res["cap_steps"] = rep.cap_steps;
  res["cap_hit"] = rep.cap_hit;
  res["mean_candidates"] = rep.mean_candidates;
  res["overlap"] = rep.overlap_value;
  res["certified_lower_bound"] = rep.certified;
  res["overlap_ratio"] = rep.overlap_ratio;
  res["certified_ratio"] = rep.certified_ratio;

  Json& base = j["baselines"] = Json::object();
  base["expected_random_overlap"] = rep.expected_random;
  if (rep.threshold_baseline) {
    Json& thr = base["threshold"] = Json::object();
    thr["threshold"] = rep.config.baseline_threshold;
    thr["hits"] = rep.threshold_baseline->hits;
    thr["overlap"] = rep.threshold_baseline->overlap_value;
    thr["overlap_ratio"] =
        static_cast<double>(rep.threshold_baseline->overlap_value) / rep.config.n;
  } else {
    base["threshold"] = nullptr;
  }

  j["permutation"] = std::vector<int>(rep.pi.begin() + 1, rep.pi.end());
  Json trace = Json::array();
  for (const StepRecord& r : rep.trace) {
    Json row;
    row["s"] = r.s;
    row["u"] = r.u;
    row["success"] = r.success;
    row["cand"] = r.cand_size;
    row["explored"] = r.explored;
    row["failed"] = r.failed;
    row["embeddings"] = r.embeddings;
    row["cap_hit"] = r.cap_hit;
    if (r.success) {
      Json& mt = row["mt"] = Json::object();
      mt["leaves"] = r.mt_leaves;
      mt["src"] = r.mt_src;
      mt["dst"] = r.mt_dst;
    } else {
      row["mt"] = nullptr;
    }
    trace.push_back(std::move(row));
  }
  j["trace"] = std::move(trace);
  Json& graphs = j["graphs"] = Json::object();
  graphs["g"] = nullptr;
  graphs["h"] = nullptr;
  if (include_wallclock) j["wallclock_ms"] = rep.wallclock_ms;
  return j;
}

// ---------------------------------------------------------------------------
// Sweeps

inline std::string fmt_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

inline std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

struct SweepRow {
  RunConfig config;
  std::optional<RunReport> report;
  std::string error;
};

inline const char* kSweepHeader =
    "n,alpha,epsilon,seed,chi,zeta,successes,steps,overlap,ratio,certified_ratio,"
    "target_ratio,wallclock_ms,error";

// Runs every config in order, streaming one CSV row each (flushed per row so
// partial sweeps are usable). A failing config yields a row with the error
// column set and the result columns empty; later configs still run.
inline std::vector<SweepRow> sweep(const std::vector<RunConfig>& configs, std::ostream& csv) {
  csv << kSweepHeader << '\n' << std::flush;
  std::vector<SweepRow> rows;
  rows.reserve(configs.size());
  for (const RunConfig& cfg : configs) {
    SweepRow row;
    row.config = cfg;
    csv << cfg.n << ',' << fmt_double(rat_to_double(cfg.alpha)) << ','
        << fmt_double(rat_to_double(cfg.epsilon)) << ',' << cfg.seed << ',';
    try {
      RunReport rep = run_experiment(cfg);
      csv << rep.design.tree.chi << ',' << rep.design.tree.zeta << ',' << rep.successes << ','
          << rep.steps << ',' << rep.overlap_value << ',' << fmt_double(rep.overlap_ratio)
          << ',' << fmt_double(rep.certified_ratio) << ',' << fmt_double(rep.target_ratio)
          << ',' << fmt_double(rep.wallclock_ms) << ',';
      row.report = std::move(rep);
    } catch (const std::exception& e) {
      row.error = e.what();
      csv << ",,,,,,,,," << csv_quote(row.error);
    }
    csv << '\n' << std::flush;
    rows.push_back(std::move(row));
  }
  return rows;
}

// Resolves an output path against TREEMATCH_OUT_DIR: relative paths land in
// that directory when the variable is set; absolute paths and empty env pass
// through unchanged.
inline std::string resolve_out_path(const std::string& path) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  const char* dir = std::getenv("TREEMATCH_OUT_DIR");
  if (!dir || !*dir) return path;
  return (std::filesystem::path(dir) / p).string();
}

}  // namespace treematch
