#include "cli.hpp"

int main(int argc, char** argv) { return kairos::cli::dispatch(argc, argv); }
