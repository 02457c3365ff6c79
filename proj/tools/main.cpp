#include "cli.hpp"

int main(int argc, char** argv) { return haplodrift::cli::run(argc, argv); }
