#include "scenario.hpp"

int main(int argc, char** argv) { return lrl::cli::run_cli(argc, argv); }
