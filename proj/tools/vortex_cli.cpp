#include "vortex/harness.hpp"

int main(int argc, char** argv) { return vortex::harness::cli(argc, argv); }
