#include <iostream>

#include "eduembed/cli.hpp"

int main(int argc, char** argv) {
  return eduembed::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
