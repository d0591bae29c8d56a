#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "topoplasma/errors.hpp"
#include "topoplasma/orchestrator.hpp"

using namespace topoplasma;

namespace {

struct Flag {
  const char* name;
  const char* key;
  const char* help;
};

const std::map<std::string, std::vector<Flag>>& command_flags() {
  static const std::map<std::string, std::vector<Flag>> m{
      {"phase",
       {{"--plane", "phase.plane", "omega_c,k_z or omega_c,omega_p"},
        {"--fixed", "phase.fixed", "value of the third parameter"},
        {"--x", "phase.x", "lo,hi,count along omega_c"},
        {"--y", "phase.y", "lo,hi,count along the second axis"}}},
      {"table1",
       {{"--sigma", "table1.sigma_bars", "comma-separated sigma_bar values"},
        {"--quadrature", "table1.quadrature", "true/false: plaquette cross-check on sigma_bar=0 rows"},
        {"--quad-n", "table1.quad_n", "radial and angular quadrature points"}}},
      {"bdi",
       {{"--north", "bdi.north", "omega_c,omega_p,k_z"},
        {"--south", "bdi.south", "omega_c,omega_p,k_z"},
        {"--ell", "bdi.ell", "gap index list"},
        {"--reg", "bdi.reg", "none | omega-decay:ETA | plasma-decay:ETA"}}},
      {"table2", {{"--reg", "table2.reg", "none | omega-decay:ETA | plasma-decay:ETA"}}},
      {"bulk-spectrum",
       {{"--omega-c", "bulk.omega_c", "cyclotron frequency"},
        {"--omega-p", "bulk.omega_p", "plasma frequency"},
        {"--kz", "bulk.k_z", "vertical wavenumber"},
        {"--reg", "bulk.reg", "regularization"},
        {"--k-max", "bulk.k_max", "largest in-plane wavenumber"},
        {"--n-k", "bulk.n_k", "number of k samples"},
        {"--theta", "bulk.theta", "in-plane angle"}}},
      {"dirac",
       {{"--model", "dirac.model", "domain-wall | singular-1 | singular-2 | reduced"},
        {"--mass", "dirac.mass", "mass scale"},
        {"--N", "dirac.N", "grid points"},
        {"--L", "dirac.L", "half period"},
        {"--scheme", "dirac.scheme", "staggered | centered"},
        {"--eta", "dirac.eta", "Laplacian regularization"},
        {"--n-xi", "dirac.n_xi", "xi samples"},
        {"--gap", "dirac.gap", "auto or lo,hi"},
        {"--crossing", "dirac.crossing", "minus | plus (reduced model)"},
        {"--north", "dirac.north", "omega_c,omega_p,k_z (reduced model)"},
        {"--south", "dirac.south", "omega_c,omega_p,k_z (reduced model)"}}},
      {"weyl",
       {{"--nscale", "weyl.nscale", "comma-separated dilation parameters"},
        {"--E", "weyl.E", "target energy"},
        {"--xi", "weyl.xi", "Fourier parameter"},
        {"--spacing", "weyl.spacing", "z spacing or auto"}}},
  };
  return m;
}

std::vector<Flag> interface_flags() {
  return {{"--preset", "profile.preset", "fig3..fig7 or none"},
          {"--omega-c", "profile.omega_c", "number, logistic:S,N[,w[,c]] or abs-logistic:..."},
          {"--omega-p", "profile.omega_p", "number, logistic:S,N[,w[,c]] or abs-logistic:..."},
          {"--kz", "profile.k_z", "vertical wavenumber"},
          {"--N", "grid.N", "grid points"},
          {"--L", "grid.L", "half period"},
          {"--n-kx", "grid.n_kx", "kx samples"},
          {"--kx-max", "grid.kx_max", "kx range"},
          {"--subsystem", "grid.subsystem", "full | tm | te"},
          {"--window", "solver.window", "auto | full | lo,hi"},
          {"--ell", "flow.ell", "gap index list"},
          {"--reg", "flow.reg", "regularization for the bulk invariants"}};
}

int threads_fallback() {
  if (const char* s = std::getenv("TOPOPLASMA_THREADS")) {
    int n = std::atoi(s);
    if (n >= 1) return n;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological invariants and interface spectra of magnetized cold plasma"};
  app.require_subcommand(1);
  std::string config_path, out_dir = "out", format = "csv";
  int threads = 0;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "key = value config file with [section] headers");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads (default TOPOPLASMA_THREADS or 1)")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--set", sets, "override any config key: section.key=value");

  std::map<std::string, std::map<std::string, std::string>> flag_values;
  std::map<std::string, CLI::App*> subs;
  for (const auto& cmd : commands()) {
    CLI::App* sub = app.add_subcommand(cmd);
    subs[cmd] = sub;
    std::vector<Flag> flags = (cmd == "interface" || cmd == "flow") ? interface_flags() : command_flags().at(cmd);
    for (const auto& f : flags) sub->add_option(f.name, flag_values[cmd][f.key], f.help);
    // allow the common flags after the subcommand too
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::string command;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) command = name;

  try {
    Config file;
    if (!config_path.empty()) file = Config::load(config_path);
    Config overrides;
    for (const auto& [key, value] : flag_values[command])
      if (!value.empty()) overrides.set(key, value);
    for (const auto& s : sets) {
      auto eq = s.find('=');
      if (eq == std::string::npos) throw InvalidParameter("--set expects section.key=value");
      overrides.set(s.substr(0, eq), s.substr(eq + 1));
    }
    Config cfg = effective_config(command, file, overrides);
    RunOptions opt;
    opt.out_dir = out_dir;
    opt.threads = threads > 0 ? threads : threads_fallback();
    opt.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    RunResult r = run_command(command, cfg, opt);
    nlohmann::json brief = {{"run_id", r.run_id}, {"dir", r.dir.string()}, {"result", r.summary["result"]}};
    std::cout << brief.dump(2) << std::endl;
    return 0;
  } catch (const InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << std::endl;
    return 2;
  } catch (const NotApplicable& e) {
    std::cerr << "not applicable: " << e.what() << std::endl;
    return 2;
  } catch (const ResolutionError& e) {
    std::cerr << "resolution error: " << e.what() << std::endl;
    return 3;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 3;
  }
}
