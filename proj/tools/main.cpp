#include "medtrade/cli.hpp"

int main(int argc, char** argv) { return medtrade::run_cli(argc, argv); }
