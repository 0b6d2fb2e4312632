#pragma once

namespace varpoly {

// Command-line entry point:
//   varpoly <analyze|subderiv|geneq|prox|epi> <file> [--out PATH] [--csv PATH]
//           [--seed N] [--tol KEY=VAL]
// Exit codes: 0 success, 2 parse error, 3 refused precondition,
// 4 consistency failure, 1 internal error.
int run_cli(int argc, const char* const* argv);

}  // namespace varpoly
