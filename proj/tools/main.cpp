#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "semrad/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectral element radiation solver"};
  std::string command, config_path, out_dir;
  std::vector<std::string> overrides;
  app.add_option("command", command, "radiate, mms, stability, scaling, spurious or meshgen")
      ->required()
      ->check(CLI::IsMember(semrad::cli::command_names()));
  app.add_option("--config", config_path, "section.key = value file or JSON")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (output.directory)");
  app.add_option("--override", overrides, "section.key=value, repeatable");
  CLI11_PARSE(app, argc, argv);

  try {
    semrad::cli::Config config =
        config_path.empty() ? semrad::cli::Config{} : semrad::cli::Config::load(config_path);
    for (const auto& o : overrides) config.set_override(o);
    if (!out_dir.empty()) config.set("output.directory", out_dir);
    return semrad::cli::run_command(command, config);
  } catch (const semrad::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
