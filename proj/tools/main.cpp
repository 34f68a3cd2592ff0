#include "cli.hpp"

int main(int argc, char** argv) { return scem::run_cli(argc, argv); }
