// Experiment runner: one or more models, N repeats each, CSV traces plus a
// summary table.

#include <iostream>
#include <string>
#include <vector>

#include "emas/experiment.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  emas::ExperimentConfig cfg;
  try {
    cfg = emas::parse_config(args);
  } catch (const emas::UsageError& e) {
    (e.exit_code() == 0 ? std::cout : std::cerr) << e.what() << '\n';
    return e.exit_code();
  }
  try {
    return emas::run_experiment(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
