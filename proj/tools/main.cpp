#include "symplan/cli/commands.hpp"

#include <csignal>
#include <iostream>

namespace {

extern "C" void on_signal(int sig)
{
  symplan::kill_active_solvers();
  std::signal(sig, SIG_DFL);
  std::raise(sig);
}

}  // namespace

int main(int argc, char** argv)
{
  for (int sig : {SIGINT, SIGTERM, SIGHUP}) std::signal(sig, on_signal);
  std::vector<std::string> args(argv, argv + argc);
  return symplan::cli::run(args, std::cout, std::cerr);
}
