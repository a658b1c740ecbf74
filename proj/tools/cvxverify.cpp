#include "cvx/cli.hpp"

int main(int argc, char** argv) { return cvx::cli_main(argc, argv); }
