#include "courtsim/cli.hpp"

int main(int argc, char** argv) {
    return courtsim::cli::run_cli(argc, argv);
}
