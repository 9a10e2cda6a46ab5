#include <iostream>

#include "fpt/cli.hpp"

int main(int argc, char** argv) {
  return fpt::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
