#include "robustpr_cli/cli.hpp"

int main(int argc, char** argv) { return robustpr::cli::run(argc, argv); }
