#include "cli/run.hpp"

int main(int argc, char** argv) { return ptn::dispatch(argc, argv); }
