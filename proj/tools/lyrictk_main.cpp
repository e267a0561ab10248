#include "lyrictk/cli.hpp"

int main(int argc, char** argv) { return lyrictk::run_cli(argc, argv); }
