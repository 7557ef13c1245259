#include "rupture/cli.hpp"

int main(int argc, char** argv) { return rupture::cli::main(argc, argv); }
