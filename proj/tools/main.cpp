#include "cli.hpp"

int main(int argc, char** argv) { return pichange::cli::run_cli(argc, argv); }
