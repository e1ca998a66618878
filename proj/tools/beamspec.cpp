#include "beamspec/cli.hpp"

int main(int argc, char** argv) { return beamspec::run(argc, argv); }
