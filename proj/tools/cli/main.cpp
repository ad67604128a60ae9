// scorekeeping command-line front end.
//
// Exit codes: 0 ok, 1 usage or configuration, 2 data or format, 3 numerical.

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "scorekeeping/errors.hpp"
#include "support.hpp"

#ifndef SCOREKEEPING_VERSION
#define SCOREKEEPING_VERSION "0.0.0"
#endif

namespace {

int fail(int code, const std::string& what) {
  std::cerr << "scorekeeping: error: " << what << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  namespace sk = scorekeeping;
  CLI::App app{"Scorekeeping probe toolkit"};
  app.set_version_flag("--version", SCOREKEEPING_VERSION);
  app.set_config("--config", "", "Key-value (TOML/INI) file supplying option values; flags override it");
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress progress output");
  app.require_subcommand(1);
  app.fallthrough();
  app.parse_complete_callback([&] { skcli::set_quiet(quiet); });
  skcli::add_commands(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const sk::UsageError& e) {
    return fail(1, e.what());
  } catch (const sk::ConfigError& e) {
    return fail(1, e.what());
  } catch (const sk::NumericalError& e) {
    return fail(3, e.what());
  } catch (const sk::Error& e) {
    return fail(2, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(2, e.what());
  } catch (const std::exception& e) {
    return fail(2, e.what());
  }
  return 0;
}
