#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace skcli {

using Json = nlohmann::ordered_json;

void set_quiet(bool quiet);
/// One line to stderr unless --quiet.
void log(const std::string& line);

void write_text(const std::filesystem::path& path, std::string_view text);

/// Options of one subcommand, split into inputs (existence-checked, digested),
/// outputs (kept out of the config echo so re-runs into another directory
/// produce the same metadata) and everything else.
class Run {
 public:
  explicit Run(CLI::App* app) : app_(app) {}

  CLI::App* app() const noexcept { return app_; }

  template <typename T>
  CLI::Option* input(const std::string& name, T& var, const std::string& desc) {
    auto* opt = app_->add_option(name, var, desc)->check(CLI::ExistingFile);
    inputs_.push_back(opt);
    return opt;
  }

  CLI::Option* output(const std::string& name, std::string& var, const std::string& desc);

  void seed(const std::string& name, std::uint64_t value);

  Json metadata() const;

  /// Writes `<output>.meta.json` next to every output.
  void write_meta(const std::vector<std::filesystem::path>& outputs) const;

 private:
  CLI::App* app_;
  std::vector<const CLI::Option*> inputs_;
  std::vector<const CLI::Option*> outputs_;
  std::vector<std::pair<std::string, std::uint64_t>> seeds_;
};

}  // namespace skcli
