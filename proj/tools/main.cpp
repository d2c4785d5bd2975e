#include "cli.hpp"

int main(int argc, char** argv) { return priceband::cli::run_cli(argc, argv); }
