#include "cli.hpp"

int main(int argc, char** argv) { return dpinv::cli::run(argc, argv); }
