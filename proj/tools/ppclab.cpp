// ppclab: command line front end. Every subcommand maps its flags onto the
// config keys understood by ppclab::run, so `ppclab run --config x.cfg` and
// the flag form are interchangeable.

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ppclab/experiment.hpp"

namespace {

struct Binding {
  std::string flag;
  std::string key;
  std::string help;
};

struct Command {
  CLI::App* app;
  std::string experiment;
  std::vector<Binding> bindings;
  std::map<std::string, std::string> values;
};

const std::vector<Binding> kSequenceFlags = {
    {"--seq", "seq.file", "sequence file"},
    {"--family", "seq.family", "blocks, identity, power, primes or lacunary"},
    {"--f", "seq.f", "growth function, e.g. ilog(1), ilog_eps(1,0.5), pow(1/3)"},
    {"--beta", "seq.beta", "block exponent beta"},
    {"--gamma", "seq.gamma", "block exponent gamma"},
    {"--jmax", "seq.jmax", "number of block levels"},
    {"--count", "seq.count", "length of a classic sequence"},
    {"--param", "seq.param", "power exponent d or lacunary ratio q"},
    {"--budget", "budget.pairs", "cap on pair counts before refusing to run"},
};

Command& add_command(CLI::App& root, std::vector<std::unique_ptr<Command>>& commands, const std::string& name,
                     const std::string& description, std::vector<Binding> bindings, bool sequence = false) {
  auto cmd = std::make_unique<Command>();
  cmd->app = root.add_subcommand(name, description);
  cmd->experiment = name;
  if (sequence) bindings.insert(bindings.begin(), kSequenceFlags.begin(), kSequenceFlags.end());
  cmd->bindings = std::move(bindings);
  for (const auto& b : cmd->bindings) cmd->app->add_option(b.flag, cmd->values[b.key], b.help);
  commands.push_back(std::move(cmd));
  return *commands.back();
}

int execute(const ppclab::ExperimentConfig& cfg) {
  try {
    ppclab::run(cfg, std::cout);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "ppclab: " << e.what() << '\n';
    return ppclab::exit_code_for(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App root{"ppclab: pair correlation and additive energy experiments"};
  root.require_subcommand(1);
  std::vector<std::unique_ptr<Command>> commands;

  add_command(root, commands, "build-seq", "generate a sequence file",
              {{"--out", "out.seq", "output file"}}, true);
  add_command(root, commands, "energy", "additive energy of the first N elements",
              {{"--n", "energy.n", "prefix length (default: all)"},
               {"--method", "energy.method", "sort, streaming, dense or bruteforce"}},
              true);
  add_command(root, commands, "scaling", "normalized energy at block checkpoints",
              {{"--levels", "scaling.levels", "levels, e.g. 8..13 or 8,10"}, {"--csv", "out.csv", "CSV output"}}, true);
  add_command(root, commands, "pc", "pair correlation count R(N, s, alpha)",
              {{"--alpha", "pc.alpha", "p/q, decimal or fixed:L:value"},
               {"--n", "pc.n", "prefix length N"},
               {"--s", "pc.s", "window s"},
               {"--method", "pc.method", "sweep, naive or reps"}},
              true);
  auto& probe = add_command(root, commands, "probe", "R along block checkpoints for one alpha",
                            {{"--levels", "probe.levels", "levels, e.g. 8..13"},
                             {"--s", "probe.s", "window s"},
                             {"--alpha", "probe.alpha", "explicit alpha"},
                             {"--theta", "probe.theta", "one_plus_log or pow(b)"},
                             {"--eta", "probe.eta", "'targeted' or a scale in [0,1]"},
                             {"--target", "probe.target", "level the targeted scale is tuned for"},
                             {"--csv", "out.csv", "CSV output"}},
                            true);
  std::vector<std::string> regular;
  probe.app->add_option("--alpha-from-regular-system", regular, "j=<level> rank=<i>")->expected(1, 2);
  add_command(root, commands, "mc", "pair correlation at random alpha",
              {{"--trials", "mc.trials", "number of alphas"},
               {"--schedule", "mc.schedule", "comma separated N values"},
               {"--s", "mc.s", "comma separated windows"},
               {"--seed", "mc.seed", "master seed"},
               {"--delta", "mc.delta", "excess threshold for the summary"},
               {"--denominator", "mc.denominator", "dyadic64 or prime64"},
               {"--csv", "out.csv", "CSV output"}},
              true);
  add_command(root, commands, "bohr", "the set {x : ||d x|| <= delta}",
              {{"--d", "bohr.d", "integer d"}, {"--delta", "bohr.delta", "radius"}});
  add_command(root, commands, "bc-ratio", "Borel-Cantelli ratio of interval sets",
              {{"--sets", "bc.sets", "comma separated interval set files"},
               {"--bohr", "bc.bohr", "comma separated d:delta Bohr sets"}});
  add_command(root, commands, "corollary", "energy table for f = ilog(r), beta = 2/3, gamma = 1/3",
              {{"--r", "corollary.r", "1 or 2"},
               {"--jmax", "corollary.jmax", "last level"},
               {"--eps", "corollary.eps", "epsilon for the dimension column"},
               {"--csv", "out.csv", "CSV output"},
               {"--budget", "budget.pairs", "cap on pair counts"}});

  auto* run_cmd = root.add_subcommand("run", "run an experiment from a config file");
  std::string config_path;
  run_cmd->add_option("--config", config_path, "config file")->required();

  try {
    root.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return root.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return root.exit(e);
  } catch (const CLI::ParseError& e) {
    root.exit(e);
    return 2;
  }

  ppclab::ExperimentConfig cfg;
  try {
    if (run_cmd->parsed()) {
      std::ifstream in(config_path);
      if (!in) throw ppclab::config_error("cannot open config '" + config_path + "'");
      cfg = ppclab::ExperimentConfig::parse(in);
      return execute(cfg);
    }
    for (const auto& cmd : commands) {
      if (!cmd->app->parsed()) continue;
      cfg.set("experiment", cmd->experiment);
      for (const auto& [key, value] : cmd->values)
        if (!value.empty()) cfg.set(key, value);
      for (const auto& item : regular) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw ppclab::config_error("expected j=<level> or rank=<i>, got '" + item + "'");
        const auto name = item.substr(0, eq);
        if (name != "j" && name != "rank") throw ppclab::config_error("unknown regular-system field '" + name + "'");
        cfg.set("probe." + name, item.substr(eq + 1));
      }
    }
  } catch (const ppclab::config_error& e) {
    std::cerr << "ppclab: " << e.what() << '\n';
    return 2;
  }
  return execute(cfg);
}
