#include <iostream>

#include "treedpp/app.hpp"

int main(int argc, char** argv) { return treedpp::runCli(argc, argv, std::cout, std::cerr); }
