#include <iostream>
#include <string>
#include <vector>

#include "dufresne/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dufresne::cli::run(args, std::cin, std::cout, std::cerr);
}
