#include "tspe/cli.hpp"

int main(int argc, char** argv) { return tspe::run_cli(argc, argv); }
