#include <iostream>
#include <string>
#include <vector>

#include "ordlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  ordlab::CliResult res = ordlab::runCli(args);
  std::cout << res.out;
  std::cerr << res.err;
  return res.exitCode;
}
