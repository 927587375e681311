#include "cli.hpp"

int main(int argc, char** argv) {
  using namespace ral::cli;
  CLI::App app{"ral: randomized proofs, interactive proofs and complexity tables"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  Context ctx;
  register_proof(app, ctx);
  register_strategy(app, ctx);
  register_compile(app, ctx);
  register_tqbf(app, ctx);
  register_kolmo(app, ctx);
  register_corpus(app, ctx);
  for (CLI::App* group : app.get_subcommands({})) group->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (!ctx.action) {
    std::cerr << "ral: no command given\n";
    return 2;
  }
  try {
    Report r = ctx.action();
    std::ostringstream out;
    emit(ctx, r, out);
    std::cout << out.str() << std::flush;
    return r.exit_code;
  } catch (const UsageError& e) {
    std::cerr << "ral: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ral: " << e.what() << '\n';
    return 1;
  }
}
