#include "qspan/cli.hpp"

int main(int argc, char** argv) { return qspan::run_cli(argc, argv); }
