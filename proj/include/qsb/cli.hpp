#pragma once
// Batch command-line front end: parse field descriptors and expressions,
// dispatch subcommands, emit deterministic report text.
//
// Exit codes: 0 = verified result, 1 = input or module error (the error name
// is the first output line), 2 = unknown / budget exhausted / incomplete
// certificate.

#include <iosfwd>
#include <string>
#include <vector>

namespace qsb {

// Run one invocation; `args` excludes the program name.  All report text goes
// to `out`; usage errors additionally go to `err`.  Identical invocations
// produce byte-identical output.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qsb
