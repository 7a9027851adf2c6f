#include <iostream>
#include <string>
#include <vector>

#include "billiards/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return billiards::cli::run(args, std::cout, std::cerr);
}
