#include "fhmix_cli/commands.hpp"

int main(int argc, char** argv) { return fhmix::cli::run_cli(argc, argv); }
