#include "cli.hpp"

int main(int argc, char** argv) { return molspin::cli::run(argc, argv); }
