#include "ptkr/experiments/cli.hpp"

int main(int argc, char** argv) { return ptkr::experiments::cli_main(argc, argv); }
