#include "cli_app.hpp"

int main(int argc, char** argv) { return distgen::run_cli(argc, argv); }
