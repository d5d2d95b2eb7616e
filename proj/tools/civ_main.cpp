#include <iostream>

#include "civ/cli/dispatch.hpp"

int main(int argc, char** argv) { return civ::cli::dispatch(argc, argv, std::cout, std::cerr); }
