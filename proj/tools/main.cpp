#include "coloke/cli.hpp"

int main(int argc, char** argv) { return coloke::cli::run_cli(argc, argv); }
