#include <seqrsp/cli.hpp>

int main(int argc, char** argv) { return seqrsp::cli::run_cli(argc, argv); }
