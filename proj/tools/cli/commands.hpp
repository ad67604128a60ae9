#pragma once

#include <CLI11.hpp>

namespace skcli {

/// Registers every subcommand. Each runs from its CLI11 callback, so errors
/// surface as exceptions out of App::parse.
void add_commands(CLI::App& app);

}  // namespace skcli
