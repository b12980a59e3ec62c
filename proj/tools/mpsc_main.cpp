#include "mpsc/cli.hpp"

int main(int argc, char** argv) { return mpsc::run_cli(argc, argv); }
