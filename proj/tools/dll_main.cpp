#include "dll/cli/commands.hpp"

int main(int argc, char** argv) { return dll::cli::run_cli(argc, argv); }
