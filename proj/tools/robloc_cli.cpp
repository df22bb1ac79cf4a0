#include <iostream>
#include <string>
#include <vector>

#include "robloc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return robloc::RunCli(args, std::cout, std::cerr);
}
