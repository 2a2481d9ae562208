// porofick command line front end.
#include "porofick/run.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <thread>

namespace {

int scan_threads() {
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("POROFICK_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) threads = std::min<int>(threads, static_cast<int>(cap));
  }
  return threads;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady and static states of swelling porous media with diffusants, charges and heat"};
  app.require_subcommand(1);

  std::string config, out;
  std::optional<double> tol, damping;
  std::optional<int> max_iter;
  bool electroneutrality = false;

  for (const char* name : {"static", "steady", "thermal", "scan"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory")->required();
    sub->add_option("--tol", tol, "fixed-point tolerance (Newton tolerance for static runs)");
    sub->add_option("--max-iter", max_iter, "outer iteration cap (Newton cap for static runs)");
    sub->add_option("--damping", damping, "Picard damping in (0,1]");
    if (std::string(name) == "scan") sub->add_flag("--electroneutrality", electroneutrality, "epsilon scaling scan");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  if (command == "scan" && !electroneutrality) {
    std::cerr << "scan: only --electroneutrality is available\n";
    return 1;
  }

  porofick::ProblemSpec spec;
  try {
    spec = porofick::load_config(config, command);
    const bool is_static = porofick::is_static(spec.kind) || spec.kind == porofick::ProblemKind::Scan;
    if (tol) (is_static ? spec.newton_tol : spec.fp_tol) = *tol;
    if (max_iter) (is_static ? spec.max_newton : spec.max_outer) = *max_iter;
    if (damping) spec.damping = *damping;
    porofick::validate(spec);
  } catch (const porofick::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }

  try {
    porofick::RunOptions options;
    options.threads = scan_threads();
    const porofick::RunResult result = porofick::run(spec, options);
    porofick::write_outputs(result, out);
    std::cout << "kind: " << porofick::to_string(result.kind) << "\n";
    std::cout << "converged: " << (result.converged ? "true" : "false") << "\n";
    if (!result.get("error").empty()) std::cerr << result.get("error") << "\n";
    return result.converged ? 0 : 2;
  } catch (const porofick::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const porofick::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}
