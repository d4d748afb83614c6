#include <exception>
#include <functional>
#include <ostream>

#include "CLI11.hpp"
#include "depthfuse/cli.hpp"

namespace depthfuse::cli {

namespace {

struct Invocation {
  std::string config_file;
  std::string output;
  std::uint64_t seed = 0;
  std::vector<std::string> overrides;
};

RunConfig assemble(const Invocation& inv, const CLI::App& sub) {
  RunConfig cfg;
  if (!inv.config_file.empty()) cfg.load_file(inv.config_file);
  for (const auto& kv : inv.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(std::string_view(kv).substr(0, eq), std::string_view(kv).substr(eq + 1));
  }
  if (sub.count("--output") > 0) cfg.output = inv.output;
  if (sub.count("--seed") > 0) cfg.seed = inv.seed;
  return cfg;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stereo and monocular depth fusion toolkit", "depthfuse"};
  app.require_subcommand(1);

  using Command = void (*)(const RunConfig&, std::ostream&);
  struct Entry {
    const char* name;
    const char* help;
    Command fn;
  };
  const Entry entries[] = {
      {"synth", "Generate a synthetic stereo dataset", cmd_synth},
      {"stereo", "Block matching, depth and confidence per frame", cmd_stereo},
      {"ssl-train", "Train the mono regressor on confident stereo depth", cmd_ssl_train},
      {"fuse", "Fuse stereo and mono depth; per-frame metrics when ground truth exists", cmd_fuse},
      {"eval", "Aggregate metrics, error-vs-distance profile and depth histogram", cmd_eval},
  };

  Invocation inv;
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", inv.config_file, "key = value configuration file");
    sub->add_option("--output", inv.output, "Output directory");
    sub->add_option("--seed", inv.seed, "Random seed");
    sub->add_option("--set", inv.overrides, "Override a configuration key (key=value)")->take_all();
    subs.emplace_back(sub, e.fn);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    for (const auto& [sub, fn] : subs) {
      if (sub->parsed()) fn(assemble(inv, *sub), out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace depthfuse::cli
