#include "ttplan/cli.hpp"

int main(int argc, char** argv) { return ttplan::cli_dispatch(argc, argv); }
