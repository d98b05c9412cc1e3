#include "logmeasure/cli.hpp"

int main(int argc, char** argv) { return logmeasure::cli::run(argc, argv); }
