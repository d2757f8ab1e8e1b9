#include "seqmine/cli.hpp"

int main(int argc, char** argv) { return seqmine::cli::run(argc, argv); }
