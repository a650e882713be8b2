#include "commands.hpp"

int main(int argc, char** argv) { return seafloor::cli::run(argc, argv); }
