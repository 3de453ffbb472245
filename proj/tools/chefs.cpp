#include "chefs/cli.hpp"

int main(int argc, char** argv) { return chefs::cli::run(argc, argv); }
