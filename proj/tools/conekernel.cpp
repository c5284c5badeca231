#include "app/cli.hpp"

int main(int argc, char** argv) { return conekernel::app::main_entry(argc, argv); }
