#include <iostream>
#include <string>
#include <vector>

#include "ggm_cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ggm::cli::run(args, std::cout, std::cerr);
}
