// Writes a synthetic <finger>_<impression>.png database for the CLI tests.
#include <cstdlib>
#include <iostream>

#include "synthetic.hpp"

int main(int argc, char** argv) {
  if (argc < 4) {
    std::cerr << "usage: make_synthetic DIR FINGERS IMPRESSIONS [SIZE] [SEED]\n";
    return 2;
  }
  const int size = argc > 4 ? std::atoi(argv[4]) : 200;
  const unsigned long long seed = argc > 5 ? std::strtoull(argv[5], nullptr, 10) : 1;
  fpaug::testing::write_database(argv[1], std::atoi(argv[2]), std::atoi(argv[3]), size, size,
                                 seed);
  return 0;
}
