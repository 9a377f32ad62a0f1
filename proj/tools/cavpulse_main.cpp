#include <iostream>

#include "cavpulse/app/commands.hpp"

int main(int argc, char** argv) {
  return cavpulse::app::run_cli(argc, argv, std::cout, std::cerr);
}
