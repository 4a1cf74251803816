#pragma once

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "ptkr/experiments/config.hpp"
#include "ptkr/experiments/figures.hpp"
#include "ptkr/experiments/table.hpp"

namespace ptkr::experiments {

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_numeric = 2 };

namespace detail {

struct Command {
  std::string name;
  std::string help;
  std::vector<std::pair<std::string, std::string>> options;  // key, description
  std::function<FigureOutput(const Config&, std::string& out_path)> run;
};

inline const std::vector<std::pair<std::string, std::string>>& param_options() {
  static const std::vector<std::pair<std::string, std::string>> v{
      {"K", "kick strength"},
      {"lambda", "gain strength"},
      {"hbar", "effective Planck constant"},
      {"N", "momentum lattice size (0 = automatic where supported)"},
      {"oversample", "angle-grid oversampling for the open boundary"},
      {"boundary", "periodic|open"}};
  return v;
}

inline const std::vector<std::pair<std::string, std::string>>& evolve_options() {
  static const std::vector<std::pair<std::string, std::string>> v{
      {"kicks", "number of kicks"},
      {"record_every", "record cadence in kicks"},
      {"renormalize", "renormalize after each kick (true|false)"},
      {"order", "free_then_kick|gain_last"},
      {"edge_fraction", "edge band per side for the truncation check"},
      {"edge_tolerance", "edge probability that flags truncation"}};
  return v;
}

inline std::vector<std::pair<std::string, std::string>> join(
    std::initializer_list<std::vector<std::pair<std::string, std::string>>> parts) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

template <class Settings, class Run>
std::function<FigureOutput(const Config&, std::string&)> make_runner(Settings (*settings)(const Config&), Run run,
                                                                      std::string fallback_out) {
  return [=](const Config& cfg, std::string& out_path) {
    Settings s = settings(cfg);
    Resolver r(cfg, "");
    out_path = r.output(fallback_out);
    cfg.reject_unused();
    const auto parent = std::filesystem::path(out_path).parent_path();
    if (!parent.empty() && !std::filesystem::is_directory(parent))
      throw ConfigError("output directory does not exist: " + parent.string());
    return run(s);
  };
}

inline std::vector<Command> commands() {
  std::vector<Command> c;
  c.push_back({"fig1", "PT-breaking order parameter against lambda",
               join({param_options(),
                     {{"hbars", "comma-separated hbar values"},
                      {"lambdas", "explicit comma-separated lambda grid"},
                      {"lambda_min", "grid start"},
                      {"lambda_max", "grid end"},
                      {"lambda_step", "grid step"},
                      {"bisect", "bisect for the critical lambda (true|false)"},
                      {"bisect_lower", "bisection bracket start"},
                      {"bisect_upper", "bisection bracket end"},
                      {"bisect_tolerance", "bisection width"},
                      {"threshold", "breaking threshold on mean |eps_i|"}}}),
               make_runner(&fig1_settings, &run_fig1, "fig1.csv")});
  c.push_back({"fig2", "Momentum current against time for several gain strengths",
               join({param_options(),
                     evolve_options(),
                     {{"lambdas", "comma-separated gain strengths"},
                      {"plateau_slope", "max |slope| of a plateau"},
                      {"plateau_length", "min plateau length in kicks"}}}),
               make_runner(&fig2_settings, &run_fig2, "fig2.csv")});
  c.push_back({"fig3", "Complex quasi-energies, eigenstate momenta and platforms",
               join({param_options(),
                     evolve_options(),
                     {{"fraction", "platform threshold relative to max eps_i"},
                      {"gap", "platform clustering gap in units of hbar"},
                      {"growth_floor", "eps_i treated as zero"},
                      {"plateau_slope", "max |slope| of a plateau"},
                      {"plateau_length", "min plateau length in kicks"}}}),
               make_runner(&fig3_settings, &run_fig3, "fig3.csv")});
  c.push_back({"fig4", "Acceleration rate against kick strength",
               join({{{"lambda", "gain strength"},
                      {"hbar", "effective Planck constant"},
                      {"N", "lattice size (0 = automatic per K)"},
                      {"oversample", "angle-grid oversampling for the open boundary"},
                      {"boundary", "periodic|open"},
                      {"k_min", "K grid start"},
                      {"k_max", "K grid end"},
                      {"k_step", "K grid step"},
                      {"ks", "explicit comma-separated K grid"},
                      {"window", "fit window in kicks"},
                      {"classical_kicks", "kicks for the classical slope"},
                      {"capture", "capture half-width of the gain snap"}},
                     evolve_options()}),
               make_runner(&fig4_settings, &run_fig4, "fig4.csv")});
  c.push_back({"spectrum", "Quasi-energy spectrum at one parameter point",
               join({param_options(), {{"vectors", "compute eigenvectors (true|false)"}}}),
               make_runner(&spectrum_settings, &run_spectrum, "spectrum.csv")});
  c.push_back({"evolve", "Single time evolution from the ground state",
               join({param_options(), evolve_options()}), make_runner(&evolve_settings, &run_evolve, "evolve.csv")});
  c.push_back({"classical", "Snapped standard-map acceleration rate against K",
               {{"k_min", "K grid start"},
                {"k_max", "K grid end"},
                {"k_step", "K grid step"},
                {"ks", "explicit comma-separated K grid"},
                {"kicks", "number of kicks"},
                {"capture", "capture half-width of the gain snap"}},
               make_runner(&classical_settings, &run_classical, "classical.csv")});
  c.push_back({"oracle-compare", "Gaussian-packet centers against the full quantum current",
               join({param_options(),
                     evolve_options(),
                     {{"transient", "kicks excluded from the comparison"},
                      {"capture", "capture half-width of the gain snap"}}}),
               make_runner(&oracle_settings, &run_oracle_compare, "oracle-compare.csv")});
  return c;
}

inline std::string extra_path(const std::string& main, const std::string& name) {
  std::filesystem::path p(main);
  const std::string stem = p.stem().string() + "_" + name + p.extension().string();
  return (p.parent_path() / stem).string();
}

}  // namespace detail

/// Command-line front end. Exit codes: 0 success, 1 usage or configuration error, 2 numeric failure.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Simulations of the kicked rotor with a complex kick potential", "ptkr"};
  app.set_version_flag("--version", std::string(PTKR_VERSION));
  app.require_subcommand(1, 1);

  const auto cmds = detail::commands();
  Config flags;
  std::string config_path;
  std::map<const CLI::App*, const detail::Command*> by_app;
  for (const auto& cmd : cmds) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    by_app[sub] = &cmd;
    sub->add_option("--config", config_path, "key = value settings file (flags override it)");
    sub->add_option_function<std::string>(
        "--out", [&flags](const std::string& v) { flags.set("out", v); }, "output CSV path");
    sub->add_flag_function(
        "--quick", [&flags](std::int64_t) { flags.set("quick", "true"); }, "reduced sizes for smoke runs");
    sub->add_flag_function(
        "--timestamp", [&flags](std::int64_t) { flags.set("timestamp", "true"); }, "record wall-clock time");
    sub->add_option_function<std::string>(
        "--workers", [&flags](const std::string& v) { flags.set("workers", v); },
        "parallel workers (PTKR_THREADS overrides)");
    for (const auto& [key, help] : cmd.options) {
      const std::string k = key;
      sub->add_option_function<std::string>(
          "--" + k, [&flags, k](const std::string& v) { flags.set(k, v); }, help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForVersion&) {
    out << PTKR_VERSION << '\n';
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    if (const auto subs = app.get_subcommands(); !subs.empty())
      err << subs.front()->help();
    else
      err << app.help();
    return exit_config;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const detail::Command& cmd = *by_app.at(chosen);
  try {
    Config cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    cfg.overlay(flags);
    std::string out_path;
    const FigureOutput result = cmd.run(cfg, out_path);
    save_table(result.table, out_path);
    out << "wrote " << out_path << " (" << result.table.size() << " rows)\n";
    for (const auto& [name, table] : result.extras) {
      const std::string p = detail::extra_path(out_path, name);
      save_table(table, p);
      out << "wrote " << p << " (" << table.size() << " rows)\n";
    }
    return exit_ok;
  } catch (const InvalidArgument& e) {
    err << "configuration error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return exit_numeric;
  }
}

}  // namespace ptkr::experiments
