#include "smnp/cli.hpp"

int main(int argc, char** argv) { return smnp::cli_main(argc, argv); }
