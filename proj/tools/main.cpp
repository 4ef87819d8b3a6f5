#include <iostream>
#include <string>
#include <vector>

#include "wehrl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const wehrl::cli::RunConfig cfg = wehrl::cli::parse_config(std::move(args));
    return wehrl::cli::run(cfg);
  } catch (const wehrl::cli::usage_error& e) {
    if (std::string(e.what()) == "help requested") return 0;
    std::cerr << "usage error: " << e.what() << std::endl;
    std::cerr << "try 'wehrl-lab --help'" << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 3;
  }
}
