#include "stsq/cli.hpp"

int main(int argc, char** argv) { return stsq::run_cli(argc, argv); }
