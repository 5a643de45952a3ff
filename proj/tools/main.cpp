#include "cli.hpp"

int main(int argc, char** argv) { return elan::cli::run(argc, argv); }
