#include <string>
#include <vector>

#include "ssg/cli_app.hpp"

int main(int argc, char** argv) {
    return ssg::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
