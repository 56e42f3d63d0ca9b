#include "layoutlab/cli_commands.hpp"

int main(int argc, char** argv) { return layoutlab::run_cli(argc, argv); }
