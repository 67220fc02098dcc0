#include <cstdio>

#include "morl/oracle.hpp"

int main(int argc, char** argv) {
  const char* path = argc > 1 ? argv[1] : MORL_CORPUS_PATH;
  morl::save_corpus(morl::generate_corpus(), path);
  std::printf("wrote %s\n", path);
  return 0;
}
