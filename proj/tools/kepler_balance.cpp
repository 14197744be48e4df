#include "kepler_balance/cli.hpp"

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return kb::run_cli(args, std::cout, std::cerr);
}
