#include "flowloss_cli.hpp"

int main(int argc, char** argv) { return flowloss::cli::run(argc, argv); }
