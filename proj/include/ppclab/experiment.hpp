#pragma once

// Flat key=value experiment configs and the dispatcher behind the ppclab
// command line. Every experiment is a pure function of its config; CSV
// outputs are byte-identical across reruns and each one gets a JSON manifest.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppclab/additive_energy.hpp"
#include "ppclab/block_sequence.hpp"
#include "ppclab/growth.hpp"
#include "ppclab/interval_set.hpp"
#include "ppclab/numeric.hpp"
#include "ppclab/pair_correlation.hpp"

namespace ppclab {

inline constexpr const char* kToolVersion = "0.3.0";
inline constexpr std::uint64_t kDefaultPairBudget = 64'000'000;

class ExperimentConfig {
 public:
  static const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "experiment",
        "seq.file", "seq.family", "seq.f", "seq.beta", "seq.gamma", "seq.jmax", "seq.count", "seq.param",
        "pc.alpha", "pc.n", "pc.s", "pc.method",
        "energy.n", "energy.method",
        "scaling.levels",
        "probe.levels", "probe.s", "probe.alpha", "probe.j", "probe.rank", "probe.theta", "probe.eta", "probe.target",
        "mc.trials", "mc.schedule", "mc.s", "mc.seed", "mc.delta", "mc.denominator",
        "bohr.d", "bohr.delta",
        "bc.sets", "bc.bohr",
        "corollary.r", "corollary.jmax", "corollary.eps",
        "out.csv", "out.seq",
        "budget.pairs",
    };
    return keys;
  }

  /// Reads "key = value" lines; '#' starts a comment. `f` and `theta` are
  /// accepted as shorthands for seq.f and probe.theta.
  static ExperimentConfig parse(std::istream& is) {
    ExperimentConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      auto t = trim(line);
      if (t.empty()) continue;
      auto eq = t.find('=');
      if (eq == std::string_view::npos)
        throw config_error("config line " + std::to_string(lineno) + ": expected 'key = value'");
      std::string key(trim(t.substr(0, eq)));
      std::string value(trim(t.substr(eq + 1)));
      try {
        cfg.set(key, value);
      } catch (const config_error& e) {
        throw config_error("config line " + std::to_string(lineno) + ": " + e.what());
      }
    }
    return cfg;
  }

  void set(std::string key, std::string value) {
    if (key == "f") key = "seq.f";
    if (key == "theta") key = "probe.theta";
    if (!known_keys().count(key)) throw config_error("unknown key '" + key + "'");
    if (value.empty()) throw config_error("empty value for '" + key + "'");
    values_[key] = std::move(value);
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  const std::string& get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw config_error("missing required key '" + key + "'");
    return it->second;
  }

  std::string get_or(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  const std::map<std::string, std::string>& values() const { return values_; }

  std::string canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
  }

  std::string hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical())));
    return buf;
  }

 private:
  std::map<std::string, std::string> values_;
};

struct RunManifest {
  std::string experiment;
  std::string config_hash;
  std::string tool_version = kToolVersion;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;
  std::map<std::string, std::string> notes;
  std::map<std::string, std::string> config;

  nlohmann::json to_json() const {
    return nlohmann::json{{"tool", "ppclab"},          {"tool_version", tool_version}, {"experiment", experiment},
                          {"config_hash", config_hash}, {"config", config},             {"started_at", started_at},
                          {"finished_at", finished_at}, {"outputs", outputs},           {"notes", notes}};
  }
};

namespace detail {

inline std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// 2^-k written as such; other values as p/q.
inline std::string fmt_scale(const Rational& x) {
  const auto& den = x.get_den();
  if (x.get_num() == 1 && mpz_popcount(den.get_mpz_t()) == 1) return "2^-" + std::to_string(bit_length(den) - 1);
  return to_string(x);
}

inline long long parse_int(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw config_error("'" + key + "' expects an integer, got '" + text + "'");
  }
}

inline std::size_t parse_count(const std::string& key, const std::string& text) {
  long long v = parse_int(key, text);
  if (v < 0) throw config_error("'" + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

inline Rational parse_rational_key(const std::string& key, const std::string& text) {
  try {
    return parse_rational(text);
  } catch (const config_error& e) {
    throw config_error("'" + key + "': " + e.what());
  }
}

inline double parse_real_key(const std::string& key, const std::string& text) {
  try {
    return parse_real(text);
  } catch (const config_error& e) {
    throw config_error("'" + key + "': " + e.what());
  }
}

/// "8..13" or "8,9,12".
inline std::vector<int> parse_levels(const std::string& key, const std::string& text) {
  std::vector<int> out;
  if (auto dots = text.find(".."); dots != std::string::npos) {
    const int a = static_cast<int>(parse_int(key, std::string(trim(text.substr(0, dots)))));
    const int b = static_cast<int>(parse_int(key, std::string(trim(text.substr(dots + 2)))));
    if (a > b) throw config_error("'" + key + "': empty level range");
    for (int j = a; j <= b; ++j) out.push_back(j);
  } else {
    for (const auto& part : split(text, ',')) out.push_back(static_cast<int>(parse_int(key, part)));
  }
  if (out.empty()) throw config_error("'" + key + "': no levels");
  return out;
}

inline std::vector<Rational> parse_rational_list(const std::string& key, const std::string& text) {
  std::vector<Rational> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_rational_key(key, part));
  if (out.empty()) throw config_error("'" + key + "': empty list");
  return out;
}

inline void check_budget(const ExperimentConfig& cfg, std::uint64_t n, const std::string& what) {
  const std::uint64_t cap =
      cfg.has("budget.pairs") ? parse_count("budget.pairs", cfg.get("budget.pairs")) : kDefaultPairBudget;
  const std::uint64_t pairs = n < 2 ? 0 : n * (n - 1) / 2;
  if (pairs > cap)
    throw budget_error(what + ": estimated " + std::to_string(pairs) + " pair counts exceed the budget of " +
                       std::to_string(cap) + " (raise budget.pairs)");
}

inline SequenceSpec sequence_spec(const ExperimentConfig& cfg) {
  SequenceSpec spec;
  spec.family = cfg.get_or("seq.family", "blocks");
  if (spec.is_blocks()) {
    spec.blocks.f = parse_growth(cfg.get_or("seq.f", "ilog(1)"));
    spec.blocks.beta = parse_real_key("seq.beta", cfg.get_or("seq.beta", "2/3"));
    spec.blocks.gamma = parse_real_key("seq.gamma", cfg.get_or("seq.gamma", "1/3"));
    spec.blocks.jmax = static_cast<int>(parse_int("seq.jmax", cfg.get("seq.jmax")));
  } else {
    (void)parse_classic_family(spec.family);
    spec.count = parse_count("seq.count", cfg.get("seq.count"));
    const std::string fallback = spec.family == "power" || spec.family == "lacunary" ? "2" : "0";
    spec.parameter = static_cast<unsigned>(parse_count("seq.param", cfg.get_or("seq.param", fallback)));
  }
  return spec;
}

inline LoadedSequence load_sequence(const ExperimentConfig& cfg) {
  if (cfg.has("seq.file")) {
    std::ifstream in(cfg.get("seq.file"));
    if (!in) throw config_error("cannot open sequence file '" + cfg.get("seq.file") + "'");
    return read_sequence(in);
  }
  if (!cfg.has("seq.family") && !cfg.has("seq.jmax"))
    throw config_error("no sequence: give seq.file, or seq.family / seq.jmax to generate one");
  return generate(sequence_spec(cfg));
}

inline const BlockSequence& require_blocks(const LoadedSequence& seq, const std::string& experiment) {
  if (!seq.blocks) throw precondition_error(experiment + " needs a block sequence (file with a ppclab block header)");
  return *seq.blocks;
}

class CsvOutput {
 public:
  CsvOutput(const ExperimentConfig& cfg, RunManifest& manifest, const std::string& header) {
    if (!cfg.has("out.csv")) return;
    path_ = cfg.get("out.csv");
    file_.open(path_, std::ios::binary | std::ios::trunc);
    if (!file_) throw config_error("cannot write '" + path_ + "'");
    file_ << header << '\n';
    manifest.outputs.push_back(path_);
  }
  bool active() const { return file_.is_open(); }
  void row(const std::string& line) {
    if (active()) file_ << line << '\n';
  }

 private:
  std::string path_;
  std::ofstream file_;
};

inline std::string join(std::initializer_list<std::string> fields) {
  std::string out;
  for (const auto& f : fields) {
    if (!out.empty()) out += ',';
    out += f;
  }
  return out;
}

// -- experiments -------------------------------------------------------------

inline void run_build_seq(const ExperimentConfig& cfg, std::ostream& out, RunManifest& manifest) {
  const auto spec = sequence_spec(cfg);
  const auto seq = generate(spec);
  const std::string path = cfg.get("out.seq");
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw config_error("cannot write '" + path + "'");
  write_sequence(file, seq.elements, spec);
  manifest.outputs.push_back(path);
  out << "wrote " << seq.elements.size() << " elements to " << path << '\n';
  if (seq.blocks) {
    for (int j = 1; j <= seq.blocks->levels(); ++j)
      out << "T_" << j << " = " << seq.blocks->checkpoint(j) << '\n';
  }
}

inline void run_energy(const ExperimentConfig& cfg, std::ostream& out, RunManifest&) {
  const auto seq = load_sequence(cfg);
  const std::size_t n = cfg.has("energy.n") ? parse_count("energy.n", cfg.get("energy.n")) : seq.elements.size();
  const auto a = truncate(seq.elements, n);
  const std::string method = cfg.get_or("energy.method", "sort");
  BigInt e;
  if (method == "sort") {
    check_budget(cfg, n, "energy");
    e = additive_energy(a);
  } else if (method == "streaming") {
    e = additive_energy_streaming(a);
  } else if (method == "dense") {
    e = additive_energy_dense(a);
  } else if (method == "bruteforce") {
    e = additive_energy_bruteforce(a);
  } else {
    throw config_error("energy.method must be sort, streaming, dense or bruteforce");
  }
  out << e.get_str() << '\n';
}

inline void run_scaling(const ExperimentConfig& cfg, std::ostream& out, RunManifest& manifest) {
  const auto loaded = load_sequence(cfg);
  const auto& seq = require_blocks(loaded, "scaling");
  const auto levels = parse_levels("scaling.levels", cfg.get("scaling.levels"));
  for (int j : levels) check_budget(cfg, seq.checkpoint(j), "scaling level " + std::to_string(j));
  const auto scaling = energy_scaling(seq, levels);
  CsvOutput csv(cfg, manifest, "j,N,energy,f(N),normalized");
  out << "j,N,energy,f(N),normalized\n";
  for (const auto& r : scaling.reports) {
    const auto line = join({std::to_string(r.level), std::to_string(r.n), r.energy.get_str(), fmt_double(r.f_n),
                            fmt_double(r.normalized)});
    csv.row(line);
    out << line << (r.arithmetic_block_empty ? "  # empty arithmetic block, excluded" : "") << '\n';
  }
  out << "normalized min=" << fmt_double(scaling.min_normalized) << " max=" << fmt_double(scaling.max_normalized)
      << " max/min=" << fmt_double(scaling.spread()) << '\n';
  manifest.notes["normalized_spread"] = fmt_double(scaling.spread());
}

inline void run_pc(const ExperimentConfig& cfg, std::ostream& out, RunManifest&) {
  const auto seq = load_sequence(cfg);
  const Alpha alpha = parse_alpha(cfg.get("pc.alpha"));
  const std::size_t n = parse_count("pc.n", cfg.get("pc.n"));
  const Rational s = parse_rational_key("pc.s", cfg.get_or("pc.s", "1"));
  const std::string method = cfg.get_or("pc.method", "sweep");
  PairCount r;
  if (method == "sweep") {
    r = pair_correlation(seq.elements, alpha, n, s);
  } else if (method == "naive") {
    check_budget(cfg, n, "pc naive");
    r = pair_correlation_naive(seq.elements, alpha, n, s);
  } else if (method == "reps") {
    check_budget(cfg, n, "pc reps");
    r = pair_correlation_via_reps(seq.elements, alpha, n, s);
  } else {
    throw config_error("pc.method must be sweep, naive or reps");
  }
  out << "R=" << fmt_double(r.value()) << " pairs=" << r.ordered_pairs << " N=" << n << " s=" << to_string(s)
      << " alpha=" << alpha.to_string() << '\n';
}

inline void run_probe(const ExperimentConfig& cfg, std::ostream& out, RunManifest& manifest) {
  const auto loaded = load_sequence(cfg);
  const auto& seq = require_blocks(loaded, "probe");
  const auto levels = parse_levels("probe.levels", cfg.get("probe.levels"));
  const Rational s = parse_rational_key("probe.s", cfg.get_or("probe.s", "1"));
  const ThetaFunction theta = parse_theta(cfg.get_or("probe.theta", "one_plus_log"));
  Alpha alpha = Alpha::rational(Rational(0));
  if (cfg.has("probe.alpha")) {
    alpha = parse_alpha(cfg.get("probe.alpha"));
    manifest.notes["alpha_source"] = "given";
  } else {
    const int j = static_cast<int>(parse_int("probe.j", cfg.get("probe.j")));
    const std::size_t rank = parse_count("probe.rank", cfg.get_or("probe.rank", "0"));
    const RegularSystemParams params{seq.params().f, theta};
    const auto candidates = exceptional_alpha_candidates(params, j, rank + 1);
    if (candidates.size() <= rank)
      throw precondition_error("level " + std::to_string(j) + " has only " + std::to_string(candidates.size()) +
                               " candidates");
    const Alpha& candidate = candidates[rank];
    const std::string eta_mode = cfg.get_or("probe.eta", "targeted");
    Rational scale;
    if (eta_mode == "targeted") {
      int target = cfg.has("probe.target") ? static_cast<int>(parse_int("probe.target", cfg.get("probe.target")))
                                           : (j <= seq.levels() ? j : *std::max_element(levels.begin(), levels.end()));
      scale = targeted_scale(candidate, params, seq.elements(), seq.checkpoint(target), s);
      manifest.notes["target_level"] = std::to_string(target);
    } else {
      scale = parse_rational_key("probe.eta", eta_mode);
    }
    const auto perturbed = perturbed_alpha(candidate, params, scale);
    alpha = perturbed.alpha;
    manifest.notes["alpha_source"] = "regular system level " + std::to_string(j) + " rank " + std::to_string(rank);
    manifest.notes["candidate"] = candidate.to_string();
    manifest.notes["rank_proxy"] = std::to_string(perturbed.rank);
    manifest.notes["eta_scale"] = fmt_scale(scale);
    manifest.notes["eta"] = to_string(perturbed.eta);
    auto range = denominator_range(params, j);
    manifest.notes["denominator_range"] = std::to_string(range.q_min) + ".." + std::to_string(range.q_max);
    out << "candidate " << candidate.to_string() << " (q in [" << range.q_min << ", " << range.q_max
        << "]), eta = psi(" << perturbed.rank << ") * " << fmt_scale(scale) << '\n';
  }
  manifest.notes["poisson_reference"] = "2s = " + to_string(Rational(2 * s));
  const auto trajectory = divergence_probe(seq, alpha, s, levels, theta);
  CsvOutput csv(cfg, manifest, "j,N,s,R,predicted,ratio");
  out << "j,N,s,R,predicted,ratio\n";
  for (const auto& e : trajectory.entries) {
    const auto line = join({std::to_string(e.level), std::to_string(e.n), fmt_double(to_double(e.s)),
                            fmt_double(e.r.value()), fmt_double(e.predicted), fmt_double(e.ratio())});
    csv.row(line);
    out << line << '\n';
  }
}

inline void run_mc(const ExperimentConfig& cfg, std::ostream& out, RunManifest& manifest) {
  const auto seq = load_sequence(cfg);
  MonteCarloConfig mc;
  mc.seed = static_cast<std::uint64_t>(parse_int("mc.seed", cfg.get_or("mc.seed", "0")));
  mc.trials = parse_count("mc.trials", cfg.get_or("mc.trials", "20"));
  for (const auto& part : split(cfg.get("mc.schedule"), ',')) mc.schedule.push_back(parse_count("mc.schedule", part));
  mc.s_values = parse_rational_list("mc.s", cfg.get_or("mc.s", "1"));
  mc.delta = parse_rational_key("mc.delta", cfg.get_or("mc.delta", "1/10"));
  const std::string denom = cfg.get_or("mc.denominator", "dyadic64");
  if (denom == "dyadic64") {
    mc.denominator = RandomDenominator::dyadic64;
  } else if (denom == "prime64") {
    mc.denominator = RandomDenominator::prime64;
  } else {
    throw config_error("mc.denominator must be dyadic64 or prime64");
  }
  const auto result = monte_carlo_ppc(seq.elements, mc);
  CsvOutput csv(cfg, manifest, "trial,seed,N,s,R");
  for (const auto& row : result.rows)
    csv.row(join({std::to_string(row.trial), std::to_string(row.trial_seed), std::to_string(row.n),
                  fmt_double(to_double(row.s)), fmt_double(row.r.value())}));
  out << "N,s,mean_R,fraction_above\n";
  for (const auto& sm : result.summary)
    out << join({std::to_string(sm.n), fmt_double(to_double(sm.s)), fmt_double(sm.mean_r), fmt_double(sm.fraction_above)})
        << '\n';
  manifest.notes["fraction_above_threshold"] = "R > (1 + " + to_string(mc.delta) + ") * 2s";
}

inline void run_bohr(const ExperimentConfig& cfg, std::ostream& out, RunManifest&) {
  const long long d = parse_int("bohr.d", cfg.get("bohr.d"));
  const Rational delta = parse_rational_key("bohr.delta", cfg.get("bohr.delta"));
  const auto set = bohr_set(d, delta);
  write_interval_set(out, set);
  out << "measure " << to_string(set.measure()) << '\n';
}

inline void run_bc_ratio(const ExperimentConfig& cfg, std::ostream& out, RunManifest&) {
  std::vector<IntervalSet> sets;
  if (cfg.has("bc.sets")) {
    for (const auto& path : split(cfg.get("bc.sets"), ',')) {
      std::ifstream in(path);
      if (!in) throw config_error("cannot open interval set file '" + path + "'");
      sets.push_back(read_interval_set(in));
    }
  }
  if (cfg.has("bc.bohr")) {
    for (const auto& item : split(cfg.get("bc.bohr"), ',')) {
      auto colon = item.find(':');
      if (colon == std::string::npos) throw config_error("bc.bohr entries look like d:delta");
      sets.push_back(bohr_set(parse_int("bc.bohr", item.substr(0, colon)),
                              parse_rational_key("bc.bohr", item.substr(colon + 1))));
    }
  }
  if (sets.empty()) throw config_error("bc-ratio needs bc.sets or bc.bohr");
  const Rational ratio = borel_cantelli_ratio(sets);
  out << "ratio " << to_string(ratio) << " (" << fmt_double(to_double(ratio)) << ")\n";
}

inline void run_corollary(const ExperimentConfig& cfg, std::ostream& out, RunManifest& manifest) {
  const int r = static_cast<int>(parse_int("corollary.r", cfg.get_or("corollary.r", "1")));
  const int jmax = static_cast<int>(parse_int("corollary.jmax", cfg.get("corollary.jmax")));
  if (r < 1 || r > 2) throw config_error("corollary.r must be 1 or 2");
  const double eps = parse_real_key("corollary.eps", cfg.get_or("corollary.eps", "1/2"));
  const auto f = GrowthFunction::iterated_log(r);
  const auto seq = build_blocks(f, 2.0 / 3.0, 1.0 / 3.0, jmax);
  check_budget(cfg, seq.checkpoint(jmax), "corollary table");
  std::vector<int> levels;
  for (int j = 1; j <= jmax; ++j) levels.push_back(j);
  const auto scaling = energy_scaling(seq, levels);
  const double dim = predicted_hausdorff_dim(GrowthFunction::iterated_log_eps(r, eps));
  CsvOutput csv(cfg, manifest, "j,T_j,energy,normalized,predicted_dim");
  out << "j,T_j,energy,normalized,predicted_dim\n";
  for (const auto& rep : scaling.reports) {
    const auto line = join({std::to_string(rep.level), std::to_string(rep.n), rep.energy.get_str(),
                            fmt_double(rep.normalized), fmt_double(dim)});
    csv.row(line);
    out << line << '\n';
  }
  out << "normalized max/min over levels with nonempty arithmetic blocks = " << fmt_double(scaling.spread()) << '\n';
  manifest.notes["normalized_spread"] = fmt_double(scaling.spread());
  manifest.notes["dimension_variant"] = GrowthFunction::iterated_log_eps(r, eps).spec();
}

inline void write_manifest(const RunManifest& manifest) {
  if (manifest.outputs.empty()) return;
  const std::string path = manifest.outputs.front() + ".manifest.json";
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw config_error("cannot write manifest '" + path + "'");
  file << std::setw(2) << manifest.to_json() << '\n';
}

}  // namespace detail

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"build-seq", "energy", "scaling", "pc", "probe",
                                                 "mc",        "bohr",   "bc-ratio", "corollary"};
  return names;
}

/// Executes cfg["experiment"], writing human-readable results to `out`, CSV
/// to out.csv when set, and a manifest next to the first output file.
inline RunManifest run(const ExperimentConfig& cfg, std::ostream& out) {
  RunManifest manifest;
  manifest.experiment = cfg.get("experiment");
  manifest.config_hash = cfg.hash();
  manifest.config = cfg.values();
  manifest.started_at = detail::utc_now();
  const auto& e = manifest.experiment;
  if (e == "build-seq") {
    detail::run_build_seq(cfg, out, manifest);
  } else if (e == "energy") {
    detail::run_energy(cfg, out, manifest);
  } else if (e == "scaling") {
    detail::run_scaling(cfg, out, manifest);
  } else if (e == "pc") {
    detail::run_pc(cfg, out, manifest);
  } else if (e == "probe") {
    detail::run_probe(cfg, out, manifest);
  } else if (e == "mc") {
    detail::run_mc(cfg, out, manifest);
  } else if (e == "bohr") {
    detail::run_bohr(cfg, out, manifest);
  } else if (e == "bc-ratio") {
    detail::run_bc_ratio(cfg, out, manifest);
  } else if (e == "corollary") {
    detail::run_corollary(cfg, out, manifest);
  } else {
    throw config_error("unknown experiment '" + e + "'");
  }
  manifest.finished_at = detail::utc_now();
  detail::write_manifest(manifest);
  return manifest;
}

/// Exit status for an exception escaping run(): 2 config, 3 precondition, 4 budget.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const config_error*>(&e)) return 2;
  if (dynamic_cast<const budget_error*>(&e)) return 4;
  return 3;
}

}  // namespace ppclab
