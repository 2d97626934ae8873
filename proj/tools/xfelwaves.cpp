// xfelwaves <subcommand> --config run.ini [--output dir] [--threads n] [--seed s]
#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "xfel/error.hpp"
#include "xfel/fft.hpp"
#include "xfel/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Ground states, dynamics and blow-up experiments for a partially confined Schrodinger equation"};
  app.require_subcommand(1, 1);
  std::string config_path, output_dir;
  int threads = 0;
  std::uint64_t seed = 0;
  for (const auto& name : xfel::subcommand_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "INI run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--output", output_dir, "run directory (overrides [run] output_dir)");
    sub->add_option("--threads", threads, "FFT worker threads (default: XFELWAVES_THREADS or 1)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "RNG seed (overrides [run] seed)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : xfel::exit_error;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  const CLI::App* sub = app.get_subcommands().front();

  if (threads == 0) {
    if (const char* env = std::getenv("XFELWAVES_THREADS")) threads = std::atoi(env);
    if (threads <= 0) threads = 1;
  }
  xfel::fft::set_threads(threads);

  xfel::RunConfig cfg;
  try {
    cfg = xfel::load_config(config_path);
  } catch (const xfel::Error& e) {
    std::cerr << "cli_io: " << config_path << ": " << e.what() << "\n";
    return xfel::exit_error;
  }
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  if (sub->count("--seed") > 0) cfg.rng_seed = seed;
  return xfel::run_subcommand(name, cfg, std::cerr);
}
