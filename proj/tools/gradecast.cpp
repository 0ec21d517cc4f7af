#include <iostream>
#include <string>
#include <vector>

#include "gradecast/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gradecast::run_cli(args, std::cout, std::cerr);
}
