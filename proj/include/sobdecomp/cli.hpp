#pragma once

namespace sobdecomp {

/// Entry point behind the sobdecomp binary. Exit codes: 0 success,
/// 1 suite or runtime failure, 2 configuration error.
int run_cli(int argc, char** argv);

}  // namespace sobdecomp
