#include "rhygarch/cli.hpp"

int main(int argc, char** argv) { return rhygarch::cli::run(argc, argv); }
