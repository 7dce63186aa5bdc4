#include "tiltkde/cli.hpp"

int main(int argc, char** argv) { return tiltkde::run_cli(argc, argv); }
