#include "sobdecomp/cli.hpp"

int main(int argc, char** argv) { return sobdecomp::run_cli(argc, argv); }
