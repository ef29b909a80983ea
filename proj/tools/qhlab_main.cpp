#include <clocale>

#include "qhlab/cli.hpp"

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");  // deterministic number formatting
    return qhlab::run_cli(argc, argv);
}
