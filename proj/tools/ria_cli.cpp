#include "ria/cli.hpp"

int main(int argc, char** argv) { return ria::run_cli(argc, argv); }
