#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "gbs/commands.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Subcommand {
  CLI::App* app;
  std::map<std::string, std::string> values;
};

std::string flag_name(const std::string& param) {
  std::string flag = "--" + param;
  for (char& c : flag)
    if (c == '_') c = '-';
  return flag;
}

const std::map<std::string, std::string>& help_text() {
  static const std::map<std::string, std::string> help{
      {"preset", "angle preset: maximal | wide"},
      {"grid", "G grid, start:stop:step or comma list"},
      {"theta", "common state phase (radians or e.g. 0.25pi)"},
      {"include_threshold", "add the violation-threshold G to the grid (true|false)"},
      {"eta", "branch weight eta"},
      {"step", "p grid step"},
      {"p1", "cavity 1 p"},
      {"p2", "cavity 2 p"},
      {"theta1", "cavity 1 phase"},
      {"theta2", "cavity 2 phase"},
      {"shots", "shots per CHSH setting"},
      {"alpha", "detector efficiency in [0, 1]"},
      {"eps", "comma-separated relative timing errors"},
  };
  return help;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace gbs::cli;

  CLI::App app{"Bell tests with generalized binomial field states"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kVersion));

  std::uint64_t seed = 42;
  std::size_t n_max = gbs::kDefaultNMax;
  std::string out;
  std::string format;
  unsigned workers = 1;
  app.add_option("--seed", seed, "RNG seed")->capture_default_str();
  app.add_option("--n-max", n_max, "Fock cutoff")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--out", out, "output path (default <command>.csv or <command>.txt)");
  app.add_option("--format", format, "csv | keyvalue")->check(CLI::IsMember({"csv", "keyvalue"}));
  app.add_option("--workers", workers, "Monte Carlo threads")->capture_default_str()->check(CLI::PositiveNumber);

  std::map<std::string, Subcommand> subs;
  const std::map<std::string, std::string> descriptions{
      {"scan", "S_B against degree of entanglement G"},
      {"pscan", "S_B against p, with its argmax"},
      {"covariance", "field means, correlation and covariance"},
      {"simulate", "Monte Carlo CHSH experiment"},
      {"generate", "fidelity of the atom-cavity generation scheme"},
      {"sensitivity", "interaction-time error table"},
  };
  for (const auto& [name, params] : command_parameters()) {
    Subcommand& sub = subs[name];
    sub.app = app.add_subcommand(name, descriptions.at(name));
    for (const auto& p : params) sub.app->add_option(flag_name(p), sub.values[p], help_text().at(p));
  }
  std::string manifest;
  CLI::App* replay = app.add_subcommand("replay", "re-run from a manifest file");
  replay->add_option("manifest", manifest, "path to a .manifest file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    Invocation inv;
    if (replay->parsed()) {
      inv = read_manifest(manifest);
      inv.workers = workers;
    } else {
      for (auto& [name, sub] : subs) {
        if (!sub.app->parsed()) continue;
        inv.command = name;
        for (const auto& [p, v] : sub.values)
          if (sub.app->count(flag_name(p)) > 0) inv.params[p] = v;
      }
      inv.seed = seed;
      inv.n_max = n_max;
      inv.out = out;
      if (!format.empty()) inv.format = format == "csv" ? Format::csv : Format::keyvalue;
      inv.workers = workers;
    }
    const RunResult result = run_invocation(inv);
    for (const auto& path : result.outputs) std::cout << path << '\n';
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
