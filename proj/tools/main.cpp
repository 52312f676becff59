#include <iostream>
#include <string>
#include <vector>

#include "ucover/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ucover::run_cli(args, std::cout, std::cerr);
}
