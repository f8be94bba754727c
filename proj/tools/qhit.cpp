#include <string>
#include <vector>

#include "qhit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qhit::cli::run(std::move(args));
}
