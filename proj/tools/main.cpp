#include "rakelink/cli.hpp"

int main(int argc, char** argv) { return rakelink::run_cli(argc, argv); }
