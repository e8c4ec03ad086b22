#include "ftsp/cli.hpp"

int main(int argc, char** argv) { return ftsp::cli_main(argc, argv); }
