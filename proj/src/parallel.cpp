#include "topoplasma/parallel.hpp"

#include <cstdlib>
#include <string>

namespace topoplasma {

int default_threads() {
  if (const char* s = std::getenv("TOPOPLASMA_THREADS")) {
    try {
      int t = std::stoi(s);
      if (t >= 1) return t;
    } catch (...) {
    }
  }
  return 1;
}

}  // namespace topoplasma
