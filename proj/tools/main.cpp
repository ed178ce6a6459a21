#include "mvksc/cli.hpp"

int main(int argc, char** argv) { return mvksc::run_cli(argc, argv); }
