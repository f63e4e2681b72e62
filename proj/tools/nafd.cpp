#include "nafd/cli.hpp"

int main(int argc, char** argv) { return nafd::cli::run(argc, argv); }
