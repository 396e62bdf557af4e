#include "cli.hpp"

int main(int argc, char** argv) { return simrel::cli_main(argc, argv); }
