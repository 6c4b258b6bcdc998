#include "hyperkg/cli.hpp"

int main(int argc, char** argv) { return hyperkg::cli::run(argc, argv); }
