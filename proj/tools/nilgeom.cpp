#include "nilgeom/cli.hpp"

int main(int argc, char **argv) { return nilgeom::cli::run(argc, argv); }
