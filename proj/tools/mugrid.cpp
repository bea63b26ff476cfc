#include "mugrid/cli.hpp"

int main(int argc, char** argv) { return mugrid::cli::dispatch(argc, argv); }
