#include "sgcert/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return sgcert::run_cli(argc, argv, std::cout, std::cerr); }
