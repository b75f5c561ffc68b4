#include <vector>

#include "oscnet/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return oscnet::cli::dispatch(args);
}
