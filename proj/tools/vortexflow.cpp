#include "vortexflow/cli.hpp"

int main(int argc, char** argv) { return vortexflow::cli_main(argc, argv); }
