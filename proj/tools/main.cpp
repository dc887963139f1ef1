#include "cli.hpp"

int main(int argc, char** argv) { return topamp::cli::run(argc, argv); }
