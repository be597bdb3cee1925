#include "ttc/cli.hpp"

int main(int argc, char** argv) { return ttc::cli::run(argc, argv); }
