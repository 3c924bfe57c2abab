#include <iostream>

#include "anderson_lab/cli.hpp"

int main(int argc, char** argv) {
  return anderson_lab::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
