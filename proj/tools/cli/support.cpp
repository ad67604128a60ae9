#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

#include "scorekeeping/corpus_io.hpp"
#include "scorekeeping/errors.hpp"
#include "scorekeeping/rng.hpp"

#ifndef SCOREKEEPING_VERSION
#define SCOREKEEPING_VERSION "0.0.0"
#endif

namespace skcli {

namespace {
bool g_quiet = false;

std::string option_value(const CLI::Option* opt) {
  if (opt->count() == 0) return opt->get_default_str();
  std::string out;
  for (const auto& r : opt->results()) {
    if (!out.empty()) out += ',';
    out += r;
  }
  return out;
}
}  // namespace

void set_quiet(bool quiet) { g_quiet = quiet; }

void log(const std::string& line) {
  if (!g_quiet) std::cerr << line << '\n';
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw scorekeeping::FormatError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw scorekeeping::FormatError("write failed: " + path.string());
}

CLI::Option* Run::output(const std::string& name, std::string& var, const std::string& desc) {
  auto* opt = app_->add_option(name, var, desc);
  outputs_.push_back(opt);
  return opt;
}

void Run::seed(const std::string& name, std::uint64_t value) { seeds_.emplace_back(name, value); }

Json Run::metadata() const {
  Json config = Json::object();
  for (const CLI::Option* opt : app_->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help") continue;
    if (std::find(outputs_.begin(), outputs_.end(), opt) != outputs_.end()) continue;
    config[name] = option_value(opt);
  }
  Json seeds = Json::object();
  for (const auto& [name, value] : seeds_) seeds[name] = value;
  Json inputs = Json::object();
  for (const CLI::Option* opt : inputs_) {
    Json files = Json::array();
    for (const auto& path : opt->results()) {
      files.push_back({{"path", path}, {"digest", scorekeeping::file_digest(path)}});
    }
    if (!files.empty()) inputs[opt->get_single_name()] = std::move(files);
  }
  const std::string canonical = config.dump();
  Json meta;
  meta["tool"] = "scorekeeping";
  meta["version"] = SCOREKEEPING_VERSION;
  meta["command"] = app_->get_name();
  meta["config_digest"] = scorekeeping::hex64(scorekeeping::fnv1a64(canonical));
  meta["config"] = std::move(config);
  meta["seeds"] = std::move(seeds);
  meta["inputs"] = std::move(inputs);
  return meta;
}

void Run::write_meta(const std::vector<std::filesystem::path>& outputs) const {
  const std::string text = metadata().dump(2) + "\n";
  for (const auto& out : outputs) {
    auto path = out;
    if (std::filesystem::is_directory(path)) {
      path /= "meta.json";
    } else {
      path += ".meta.json";
    }
    write_text(path, text);
  }
}

}  // namespace skcli
