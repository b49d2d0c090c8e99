#include "eci/cli.hpp"

int main(int argc, char** argv) { return eci::run_cli_main(argc, argv); }
