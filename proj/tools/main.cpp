#include "cmbo/cli.hpp"

int main(int argc, char** argv) { return cmbo::cli::run_cli(argc, argv); }
