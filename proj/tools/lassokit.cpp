#include "lassokit/cli.hpp"

int main(int argc, char **argv) { return lassokit::cli::run(argc, argv); }
