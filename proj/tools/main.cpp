// logsmith command-line interface. Subcommands are wired up in cli.hpp; this
// translation unit only owns main() so the toolkit itself stays header-only.
#include "logsmith/cli.hpp"

int main(int argc, char** argv) { return logsmith::cli::run(argc, argv); }
