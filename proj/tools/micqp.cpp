#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "micqp/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Exact mixed integer convex quadratic programming"};
  app.require_subcommand(1);
  std::string path;
  bool trace = false;
  const std::map<std::string, std::string> about{
      {"solve", "minimize the objective exactly"},
      {"oracle", "minimize by enumerating the declared box"},
      {"bounded", "decide feasibility and boundedness"},
      {"feasible", "find a mixed integer point of the constraint set"},
      {"reduce-fulldim", "emit the equivalent full-dimensional instance"},
      {"sandwich", "inner and outer balls for the projected set"},
      {"flatness", "lattice point or thin direction for a ball (file: a, r, B)"},
      {"ginv", "integer reflexive generalized inverse (file: A)"}};
  for (const auto& name : micqp::command_names()) {
    auto* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("input", path, "instance or data file (JSON)")->required();
    sub->add_flag("--trace", trace, "include the feasibility recursion trace");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  std::string text;
  try {
    text = micqp::read_file(path);
  } catch (const micqp::Error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  }
  const micqp::CommandOutput out = micqp::run_command(command, text, trace);
  if (out.exit_code != 0) {
    std::cerr << out.error << "\n";
    return out.exit_code;
  }
  std::cout << out.result.dump(2) << "\n";
  return 0;
}
