#include <iostream>
#include <string>
#include <vector>

#include "cliffbell/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cliffbell::app::run(args, std::cout, std::cerr);
}
