#include "fairrec/cli.hpp"

int main(int argc, char** argv) { return fairrec::cli::main(argc, argv); }
