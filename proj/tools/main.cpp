#include "subgcn/cli.hpp"

int main(int argc, char** argv) { return subgcn::cli::run(argc, argv); }
