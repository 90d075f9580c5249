#include "fnls/cli.hpp"

int main(int argc, char** argv) { return fnls::cli::run(argc, argv); }
