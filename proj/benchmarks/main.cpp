#include <benchmark/benchmark.h>

// The packaged benchmark_main archive is LTO bytecode tied to another
// compiler release, so the entry point is compiled here.
BENCHMARK_MAIN();
