#include "cli.hpp"

int main(int argc, char** argv) { return spinboson::cli::main_entry(argc, argv); }
