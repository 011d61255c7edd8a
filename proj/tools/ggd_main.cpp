#include <iostream>

#include "ggd/cli.hpp"

int main(int argc, char** argv) {
  return ggd::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
