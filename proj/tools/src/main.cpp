#include "nhs/cli.hpp"

int main(int argc, char** argv) { return nhs::cli::main(argc, argv); }
