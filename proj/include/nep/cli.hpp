#pragma once

#include <stdexcept>

namespace nep::cli {

/// Bad flags, unreadable inputs or inconsistent options (exit status 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Runs the `nep` command line. Returns the process exit status: 0 ok, 1 numeric error, 2 config error.
int run(int argc, char** argv);

} // namespace nep::cli
