#include <string>
#include <vector>

#include "lsr/cli.hpp"

int main(int argc, char** argv) {
    return lsr::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
