#include <iostream>
#include <string>
#include <vector>

#include "pvrfid/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return pvrfid::run(args, std::cout, std::cerr);
}
