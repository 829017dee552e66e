#include "quasispec/cli.hpp"

int main(int argc, char** argv) { return quasispec::cli_main(argc, argv); }
