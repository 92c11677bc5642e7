#include <iostream>

#include "webqa/cli.hpp"

int main(int argc, char **argv) {
  return webqa::run_cli(argc, argv, std::cout, std::cerr);
}
