#include <steadykernel/cli.hpp>

#include <cstdio>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    steadykernel::CliResult res = steadykernel::run_cli(args);
    if (!res.out.empty()) std::fputs(res.out.c_str(), stdout);
    if (!res.err.empty()) std::fputs(res.err.c_str(), stderr);
    return res.exit_code;
}
