#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "heatframe/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Heat-kernel and localization-envelope verification on Jacobi spaces"};
  app.require_subcommand(1);

  heatframe::RunConfig config;
  double sigma = 0.0;
  int k_override = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--gamma", config.gamma, "Weight exponent at x = 1")->capture_default_str();
    sub->add_option("--alpha", config.alpha, "Weight exponent at x = -1")->capture_default_str();
    sub->add_option("--nodes", config.nodes, "Quadrature nodes")->capture_default_str();
    sub->add_option("--degree", config.degree, "Spectral truncation degree")->capture_default_str();
    sub->add_option("--t", config.t, "Heat time in (0, 1]")->capture_default_str();
    sub->add_option("--delta", config.delta, "Net and envelope scale")->capture_default_str();
    sub->add_option("--sigma", sigma, "Envelope decay exponent (default 2k + 1)");
    sub->add_option("--k-override", k_override, "Force the doubling exponent");
    sub->add_option("--seed", config.seed, "Sampling seed")->capture_default_str();
    sub->add_option("--out", config.out, "Output path, - for stdout")->capture_default_str();
  };

  auto* verify = app.add_subcommand("verify", "Run the full inequality registry, write JSON");
  auto* kernel = app.add_subcommand("kernel", "Write the heat kernel table as CSV");
  auto* net = app.add_subcommand("net", "Write a maximal net and its partition as CSV");
  auto* decompose = app.add_subcommand("decompose", "Write band coefficients as CSV");
  for (auto* sub : {verify, kernel, net, decompose}) add_common(sub);
  decompose->add_option("--function", config.function, "random or P<i>")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (auto* sub : {verify, kernel, net, decompose}) {
    if (sub->parsed()) {
      config.command = *heatframe::parse_command(sub->get_name());
      if (sub->count("--sigma") > 0) config.sigma = sigma;
      if (sub->count("--k-override") > 0) config.k_override = k_override;
    }
  }
  return heatframe::run(config, std::cout, std::cerr);
}
