#include "kepler_balance/acceptance.hpp"

#include <exception>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  const std::string only = argc > 1 ? argv[1] : "";
  try {
    const auto results = kb::run_acceptance(only);
    return kb::print_acceptance(results, std::cout) ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << "\n";
    return 2;
  }
}
