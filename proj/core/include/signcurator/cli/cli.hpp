#pragma once

namespace signcurator::cli {

// Entry point behind the `signcurator` binary. Returns the process exit
// code: 0 success, 1 validation or usage error, 2 runtime failure.
int dispatch(int argc, char** argv);

}  // namespace signcurator::cli
