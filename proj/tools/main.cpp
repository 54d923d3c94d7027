#include <iostream>
#include <string>
#include <vector>

#include "credit_transfer/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return credit_transfer::run_cli(args, std::cout, std::cerr);
}
