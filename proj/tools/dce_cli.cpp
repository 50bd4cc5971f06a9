#include "dce/cli.hpp"

int main(int argc, char** argv) { return dce::run_cli(argc, argv); }
