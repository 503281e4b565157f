#include "signcurator/cli/cli.hpp"

int main(int argc, char** argv) {
  return signcurator::cli::dispatch(argc, argv);
}
