#include <iostream>

#include "lidarsynth_tools/commands.hpp"

int main(int argc, char** argv) {
  return lidarsynth::tools::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
