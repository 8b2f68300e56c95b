#include "qiopa/cli/commands.hpp"

int main(int argc, char** argv) { return qiopa::cli::run_cli(argc, argv); }
