#include "gnfr/cli.hpp"

int main(int argc, char** argv) { return gnfr::cli::run(argc, argv); }
