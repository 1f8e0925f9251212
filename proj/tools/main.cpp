#include "cli.hpp"

int main(int argc, char **argv) { return cifti::run_cli(argc, argv); }
