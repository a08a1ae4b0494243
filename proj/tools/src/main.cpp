#include "vccrecon/cli.hpp"

int main(int argc, char **argv) { return vcc::cli::run(argc, argv); }
