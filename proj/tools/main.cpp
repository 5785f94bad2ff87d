#include "mlgb/cli.hpp"

int main(int argc, char** argv) { return mlgb::run_cli(argc, argv); }
