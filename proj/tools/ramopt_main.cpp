#include "ramopt/harness.hpp"

int main(int argc, char** argv) { return ramopt::cli_main(argc, argv); }
