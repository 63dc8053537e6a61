#include "imprint/cli.hpp"

int main(int argc, char** argv) { return imprint::cli::run(argc, argv); }
