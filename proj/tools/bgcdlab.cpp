#include "bgcd/cli.hpp"

int main(int argc, char** argv) { return bgcd::run_cli(argc, argv); }
