#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace tvflow {

/// Command-line entry point. Exit codes: 0 success, 1 usage error,
/// 2 data error (missing or malformed files), 3 failed verification or
/// certificate check.
int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

}  // namespace tvflow
