#include "swarmloc/cli.hpp"

int main(int argc, char** argv) { return swarmloc::cli_main(argc, argv); }
