#include <iostream>
#include <string>
#include <vector>

#include "landau_ee/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return landau_ee::cli::run(args, std::cout, std::cerr);
}
