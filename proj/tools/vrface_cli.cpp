#include "commands.hpp"

int main(int argc, char** argv) { return vrface::cli::run(argc, argv); }
