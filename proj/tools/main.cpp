#include <string>
#include <vector>

#include "cursim_cli.hpp"

int main(int argc, char** argv) {
    return cursim::cli::run(std::vector<std::string>(argv, argv + argc));
}
