#include <iostream>

#include "mlmod/cli.hpp"

int main(int argc, char** argv) {
  return mlmod::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
