#include "nhtdse/app.hpp"

int main(int argc, char** argv) { return nhtdse::run_cli(argc, argv); }
