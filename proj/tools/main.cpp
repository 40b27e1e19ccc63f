#include "lab.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return olb::lab::main_with_args(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
