#pragma once

namespace abacus {

//! Entry point of the `abacus` tool: subcommands detect, simulate and
//! evaluate. Returns 0 on success, 1 on usage errors, 2 on runtime errors.
int
cli_main(int argc, const char* const* argv);

} // namespace abacus
