#include <iostream>
#include <string>
#include <vector>

#include "commlm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return commlm::cli::run(args, std::cout, std::cerr);
}
