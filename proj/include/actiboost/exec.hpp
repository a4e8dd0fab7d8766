#pragma once

namespace actiboost {

// Execution policy for the batch kernels. Each OpenMP kernel has a serial
// reference twin; the two produce bitwise-identical output because parallel
// iterations write disjoint slots and reductions run in index order.
enum class Exec { serial, parallel };

int max_threads();
void set_threads(int n);  // n <= 0 restores the OpenMP default

}  // namespace actiboost
