#include "spinband/harness.hpp"

int main(int argc, char** argv) { return spinband::cli_main(argc, argv); }
