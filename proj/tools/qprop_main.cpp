#include <CLI11.hpp>

#include <string>

#include "qprop/scenarios.hpp"
#include "qprop/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qprop: exact propagators for quadratic Hamiltonians and oscillator chains"};
  app.set_version_flag("--version", QPROP_VERSION);
  app.require_subcommand(1);

  const char* names[] = {"propagate",    "chain-eigs",   "excitation-map",
                         "first-maxima", "evolve-state", "forced-chain"};
  const char* briefs[] = {
      "evaluate the Gaussian kernel of a quadratic Hamiltonian on a (q, q') grid",
      "normal modes of an oscillator chain",
      "site-resolved excitation transport map P(site, tau)",
      "first maxima of P(site, tau) and their linear fit",
      "evolve a Gaussian state in normal coordinates",
      "mean occupations of a driven ladder chain"};

  struct Options {
    std::string config;
    std::string out = ".";
    int threads = 1;
  };
  std::vector<Options> opts(std::size(names));

  for (std::size_t i = 0; i < std::size(names); ++i) {
    CLI::App* sub = app.add_subcommand(names[i], briefs[i]);
    sub->add_option("--config", opts[i].config, "JSON scenario config")->required();
    sub->add_option("--out", opts[i].out, "output directory");
    sub->add_option("--threads", opts[i].threads, "worker threads")->check(CLI::PositiveNumber);
  }

  CLI11_PARSE(app, argc, argv);

  for (std::size_t i = 0; i < std::size(names); ++i) {
    if (app.get_subcommand(names[i])->parsed())
      return qprop::cli::run_config_file(opts[i].config, opts[i].out, opts[i].threads, names[i]);
  }
  return qprop::cli::kFailure;
}
