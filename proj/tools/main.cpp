#include "driftscan/commands.hpp"

int main(int argc, char** argv) { return driftscan::cli::run(argc, argv); }
