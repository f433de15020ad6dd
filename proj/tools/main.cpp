#include "cli.hpp"

int main(int argc, char** argv) { return rdmft::cli::run(argc, argv); }
