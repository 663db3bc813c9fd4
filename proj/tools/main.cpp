#include "quatslide/cli.hpp"

int main(int argc, char** argv) { return quatslide::cli_main(argc, argv); }
