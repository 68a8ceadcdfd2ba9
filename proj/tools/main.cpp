#include "cli.hpp"

int main(int argc, char** argv) { return socmarket::cli::run(argc, argv); }
