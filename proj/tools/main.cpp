#include "swnn/cli.hpp"

int main(int argc, char** argv) { return swnn::cli::run(argc, argv); }
