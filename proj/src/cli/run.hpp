#pragma once

namespace ptn {

// CLI entry point.  Exit code: 0 success / all criteria pass, 1 criterion
// failure or failed run, 2 usage or config error.
int dispatch(int argc, char** argv);

} // namespace ptn
