#include "mumimo/harness.hpp"

int main(int argc, char** argv) { return mumimo::cli_main(argc, argv); }
