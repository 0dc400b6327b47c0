#include "nep/cli.hpp"

int main(int argc, char** argv) { return nep::cli::run(argc, argv); }
