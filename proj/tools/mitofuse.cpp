#include "mitofuse/cli.hpp"

int main(int argc, char** argv) { return mitofuse::cli_main(argc, argv); }
