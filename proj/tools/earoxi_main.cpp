#include "earoxi/cli.hpp"

int main(int argc, char** argv) { return earoxi::cli::run(argc, argv); }
