#include <csignal>
#include <iostream>

#include "hdna/cli.hpp"

int main(int argc, char** argv) {
  std::signal(SIGPIPE, SIG_IGN);
  return hdna::run_cli(argc, argv, std::cout, std::cerr);
}
