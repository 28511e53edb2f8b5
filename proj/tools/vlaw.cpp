#include "vlaw/cli/cli.hpp"

int main(int argc, char** argv) {
    return vlaw::cli::cli_main(argc, argv);
}
