#include "relosc/cli.hpp"

int main(int argc, char** argv) { return relosc::cli::run(argc, argv); }
