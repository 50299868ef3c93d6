#include "sogppa/cli.hpp"

int main(int argc, char** argv) { return sogppa::run(argc, argv); }
