#pragma once

namespace elan::cli {

// Entry point shared by the `elan` binary and in-process tests.
int run(int argc, char** argv);

}  // namespace elan::cli
