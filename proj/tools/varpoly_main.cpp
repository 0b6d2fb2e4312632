#include "varpoly/cli.hpp"

int main(int argc, char** argv) { return varpoly::run_cli(argc, argv); }
