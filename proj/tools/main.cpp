#include <iostream>

#include "cli/commands.hpp"

int main(int argc, char** argv) {
  return thermal_cbf::cli::run_cli(argc, argv, std::cout, std::cerr);
}
