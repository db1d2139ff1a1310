#include <iostream>
#include <string>
#include <vector>

#include "stripneg/cli.hpp"

int main(int argc, char** argv) {
  return stripneg::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
