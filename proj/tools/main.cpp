#include "commands.hpp"

int main(int argc, char** argv) { return nlds::cli::run(argc, argv); }
