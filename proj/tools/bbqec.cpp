#include "cli_app.hpp"

int main(int argc, char** argv) { return bbqec::cli::run(argc, argv); }
