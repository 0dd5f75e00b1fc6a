#include <iostream>
#include <string>
#include <vector>

#include "frbs/harness.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  args.insert(args.begin(), argv[0]);
  return frbs::cli(args, std::cout, std::cerr);
}
