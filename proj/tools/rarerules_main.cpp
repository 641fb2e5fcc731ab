#include "rarerules/cli.hpp"

int main(int argc, char** argv) { return rarerules::cli::run(argc, argv); }
