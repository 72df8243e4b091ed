#include <iostream>
#include <string>
#include <vector>

#include "arcvar/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return arcvar::cli_dispatch(args, std::cout, std::cerr);
}
