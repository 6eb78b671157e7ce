#include "topotext/cli.hpp"

int main(int argc, char** argv) { return topotext::cli::run(argc, argv); }
