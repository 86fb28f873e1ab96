#include "gapedge/cli.hpp"

int main(int argc, char** argv) { return gapedge::cli::main(argc, argv); }
