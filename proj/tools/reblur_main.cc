#include "reblur/cli/commands.h"

int main(int argc, char** argv) { return reblur::cli::Main(argc, argv); }
