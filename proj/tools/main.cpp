#include "commands.hpp"

int main(int argc, char** argv) { return satrag::cli::run(argc, argv); }
